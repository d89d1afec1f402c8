#include "fredsolve/numerics.hpp"
#include "fredsolve/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace fredsolve {

namespace {

constexpr double kPi = std::numbers::pi;

void check_interval(int n, double a, double b) {
    if (n < 1) throw InvalidArgument("quadrature order must be positive");
    if (!(a < b)) throw InvalidArgument("quadrature interval must satisfy a < b");
}

Grid1D map_reference(const std::vector<double>& t, const std::vector<double>& w, double a,
                     double b) {
    Grid1D g;
    g.a = a;
    g.b = b;
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    const int n = static_cast<int>(t.size());
    g.nodes.resize(n);
    g.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        g.nodes[i] = mid + half * t[i];
        g.weights[i] = half * w[i];
    }
    return g;
}

// Panels needed so that an n-point rule resolves N full periods.
int panels_for_modes(int N, int n) {
    return std::max(1, static_cast<int>(std::ceil(4.0 * N / std::max(n, 1))) + 1);
}

} // namespace

GridFunction::GridFunction(Grid1D g, Eigen::VectorXd v) : grid(std::move(g)), values(std::move(v)) {
    if (values.size() != grid.size())
        throw InvalidArgument("grid function length does not match its grid");
}

GridFunction GridFunction::sample(const Grid1D& g, const Fn1& f) {
    Eigen::VectorXd v(g.size());
    for (int i = 0; i < g.size(); ++i) v[i] = f(g.nodes[i]);
    return {g, std::move(v)};
}

Grid1D gauss_legendre(int n, double a, double b) {
    check_interval(n, a, b);
    std::vector<double> t(n), w(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int k = 1; k <= n; ++k) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
            }
            dp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        // recompute the derivative at the converged root
        double p0 = 1.0, p1 = 0.0;
        for (int k = 1; k <= n; ++k) {
            const double p2 = p1;
            p1 = p0;
            p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
        }
        dp = n * (z * p0 - p1) / (z * z - 1.0);
        t[i] = -z;
        t[n - 1 - i] = z;
        w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    if (n % 2 == 1) t[n / 2] = 0.0;
    return map_reference(t, w, a, b);
}

Grid1D gauss_lobatto(int n, double a, double b) {
    check_interval(n, a, b);
    if (n < 2) throw InvalidArgument("Gauss-Lobatto needs at least 2 points");
    const int N = n - 1;
    std::vector<double> t(n), w(n);
    for (int i = 0; i < n; ++i) {
        double x = -std::cos(kPi * i / N);
        double pn = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x, pm1 = 1.0;
            for (int k = 2; k <= N; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pn = (N == 1) ? x : p1;
            pm1 = (N == 1) ? 1.0 : p0;
            const double dx = (x * pn - pm1) / (n * pn);
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= N; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        pn = (N == 1) ? x : p1;
        t[i] = x;
        w[i] = 2.0 / (N * n * pn * pn);
    }
    t.front() = -1.0;
    t.back() = 1.0;
    return map_reference(t, w, a, b);
}

Grid1D composite_gauss(int n, int panels, double a, double b) {
    check_interval(n, a, b);
    if (panels < 1) throw InvalidArgument("panel count must be positive");
    std::vector<double> bp;
    for (int p = 1; p < panels; ++p) bp.push_back(a + (b - a) * p / panels);
    return panel_gauss(n, std::move(bp), a, b);
}

Grid1D panel_gauss(int n, std::vector<double> breakpoints, double a, double b) {
    check_interval(n, a, b);
    breakpoints.push_back(a);
    breakpoints.push_back(b);
    std::sort(breakpoints.begin(), breakpoints.end());
    const Grid1D ref = gauss_legendre(n, -1.0, 1.0);
    Grid1D g;
    g.a = a;
    g.b = b;
    double lo = a;
    for (double bp : breakpoints) {
        if (bp <= lo || bp > b) continue;
        if (bp - lo < 1e-14 * (b - a)) continue;
        const double half = 0.5 * (bp - lo), mid = 0.5 * (bp + lo);
        for (int i = 0; i < n; ++i) {
            g.nodes.push_back(mid + half * ref.nodes[i]);
            g.weights.push_back(half * ref.weights[i]);
        }
        lo = bp;
    }
    return g;
}

Grid1D graded_gauss(int n, const std::vector<double>& centers, double finest, double a, double b) {
    check_interval(n, a, b);
    if (!(finest > 0.0)) throw InvalidArgument("finest panel width must be positive");
    std::vector<double> bp;
    for (double c : centers) {
        if (c < a || c > b) continue;
        bp.push_back(c);
        for (double d = finest; d < (b - a); d *= 2.0) {
            if (c - d > a) bp.push_back(c - d);
            if (c + d < b) bp.push_back(c + d);
        }
    }
    return panel_gauss(n, std::move(bp), a, b);
}

double integrate(const GridFunction& f) {
    return f.grid.w().dot(f.values);
}

double integrate(const Grid1D& g, const Fn1& f) {
    double s = 0.0;
    for (int i = 0; i < g.size(); ++i) s += g.weights[i] * f(g.nodes[i]);
    return s;
}

double l2_norm(const Grid1D& g, const Eigen::VectorXd& v) {
    return std::sqrt(g.w().dot(v.cwiseAbs2()));
}

double l2_norm(const GridFunction& f) {
    return l2_norm(f.grid, f.values);
}

Eigen::MatrixXd interpolation_matrix(const Grid1D& g, const std::vector<double>& z) {
    const int n = g.size();
    // barycentric weights in log form to avoid overflow at large n
    const double mid = 0.5 * (g.a + g.b), half = 0.5 * (g.b - g.a);
    std::vector<double> t(n), logw(n), sgn(n);
    for (int j = 0; j < n; ++j) t[j] = (g.nodes[j] - mid) / half;
    double maxlog = -1e300;
    for (int j = 0; j < n; ++j) {
        double lw = 0.0, s = 1.0;
        for (int k = 0; k < n; ++k) {
            if (k == j) continue;
            const double d = t[j] - t[k];
            lw -= std::log(std::abs(d));
            if (d < 0) s = -s;
        }
        logw[j] = lw;
        sgn[j] = s;
        maxlog = std::max(maxlog, lw);
    }
    Eigen::VectorXd bw(n);
    for (int j = 0; j < n; ++j) bw[j] = sgn[j] * std::exp(logw[j] - maxlog);

    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(z.size()), n);
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double zi = (z[i] - mid) / half;
        int hit = -1;
        for (int j = 0; j < n; ++j)
            if (zi == t[j]) hit = j;
        if (hit >= 0) {
            P(static_cast<Eigen::Index>(i), hit) = 1.0;
            continue;
        }
        double den = 0.0;
        for (int j = 0; j < n; ++j) {
            const double c = bw[j] / (zi - t[j]);
            P(static_cast<Eigen::Index>(i), j) = c;
            den += c;
        }
        P.row(static_cast<Eigen::Index>(i)) /= den;
    }
    return P;
}

double interpolate(const Grid1D& g, const Eigen::VectorXd& v, double z) {
    return interpolation_matrix(g, {z}).row(0).dot(v);
}

Eigen::MatrixXd integral_operator(const Kernel2D& k, const Grid1D& src,
                                  const std::vector<double>& x_out, int panel_order) {
    const int n = src.size();
    const auto m = static_cast<Eigen::Index>(x_out.size());
    Eigen::MatrixXd A(m, n);
    if (k.kink == Kink::None) {
        for (Eigen::Index i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j) A(i, j) = k(x_out[i], src.nodes[j]) * src.weights[j];
        return A;
    }
    const int q = panel_order > 0 ? panel_order : std::max(n, 16);
    for (Eigen::Index i = 0; i < m; ++i) {
        const double x = x_out[i];
        Grid1D pg = (x > src.a && x < src.b) ? panel_gauss(q, {x}, src.a, src.b)
                                             : gauss_legendre(q, src.a, src.b);
        const Eigen::MatrixXd P = interpolation_matrix(src, pg.nodes);
        Eigen::VectorXd kw(pg.size());
        for (int s = 0; s < pg.size(); ++s) kw[s] = k(x, pg.nodes[s]) * pg.weights[s];
        A.row(i) = kw.transpose() * P;
    }
    return A;
}

Eigen::MatrixXd integral_operator(const Kernel2D& k, const Grid1D& src) {
    return integral_operator(k, src, src.nodes);
}

double apply_kernel(const Kernel2D& k, const Fn1& g, double x, double a, double b,
                    int quad_order) {
    const Grid1D q = (k.kink == Kink::Diagonal && x > a && x < b)
                         ? panel_gauss(quad_order, {x}, a, b)
                         : gauss_legendre(quad_order, a, b);
    double s = 0.0;
    for (int i = 0; i < q.size(); ++i) s += q.weights[i] * k(x, q.nodes[i]) * g(q.nodes[i]);
    return s;
}

FourierCoeffs fourier_coeffs(const Fn1& f, int N, int quad_order) {
    if (N < 1) throw InvalidArgument("Fourier truncation N must be at least 1");
    const Grid1D g = composite_gauss(quad_order, panels_for_modes(N, quad_order), 0.0, 1.0);
    FourierCoeffs c;
    c.cn = Eigen::VectorXd::Zero(N);
    c.cn_prime = Eigen::VectorXd::Zero(N);
    for (int i = 0; i < g.size(); ++i) {
        const double x = g.nodes[i];
        const double fw = 2.0 * g.weights[i] * f(x);
        c.c0 += fw;
        for (int n = 1; n <= N; ++n) {
            c.cn[n - 1] += fw * std::cos(2.0 * n * kPi * x);
            c.cn_prime[n - 1] += fw * std::sin(2.0 * n * kPi * x);
        }
    }
    return c;
}

KernelFourier kernel_fourier_coeffs(const Kernel2D& k, int N, int quad_order) {
    if (N < 1) throw InvalidArgument("Fourier truncation N must be at least 1");
    const int panels = panels_for_modes(N, quad_order);
    const Grid1D outer = composite_gauss(quad_order, panels, 0.0, 1.0);
    const int mx = outer.size();

    // Inner projections: row i holds int k(x_i, xi) e_m(xi) dxi with e = 1, cos_1..N, sin_1..N.
    Eigen::MatrixXd C(mx, 2 * N + 1);
    for (int i = 0; i < mx; ++i) {
        const double x = outer.nodes[i];
        std::vector<double> bp;
        for (int p = 1; p < panels; ++p) bp.push_back(static_cast<double>(p) / panels);
        if (k.kink == Kink::Diagonal) bp.push_back(x);
        const Grid1D inner = panel_gauss(quad_order, bp, 0.0, 1.0);
        Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(2 * N + 1);
        for (int q = 0; q < inner.size(); ++q) {
            const double xi = inner.nodes[q];
            const double v = inner.weights[q] * k(x, xi);
            row[0] += v;
            for (int m = 1; m <= N; ++m) {
                row[m] += v * std::cos(2.0 * m * kPi * xi);
                row[N + m] += v * std::sin(2.0 * m * kPi * xi);
            }
        }
        C.row(i) = row;
    }
    // Outer test functions with weights, times the overall factor 2.
    Eigen::MatrixXd E(2 * N + 1, mx);
    for (int i = 0; i < mx; ++i) {
        const double x = outer.nodes[i], w = 2.0 * outer.weights[i];
        E(0, i) = w;
        for (int n = 1; n <= N; ++n) {
            E(n, i) = w * std::cos(2.0 * n * kPi * x);
            E(N + n, i) = w * std::sin(2.0 * n * kPi * x);
        }
    }
    const Eigen::MatrixXd P = E * C;  // P(test_x, test_xi)

    KernelFourier kf;
    kf.p00 = P(0, 0);
    kf.p0m = P.block(0, 1, 1, N).transpose();
    kf.p0m_prime = P.block(0, N + 1, 1, N).transpose();
    kf.p0n = P.block(1, 0, N, 1);
    kf.p0n_prime = P.block(N + 1, 0, N, 1);
    kf.pnm = P.block(1, 1, N, N);
    kf.pnm_p = P.block(1, N + 1, N, N);
    kf.pnm_pp = P.block(N + 1, 1, N, N);
    kf.pnm_ppp = P.block(N + 1, N + 1, N, N);
    return kf;
}

} // namespace fredsolve
