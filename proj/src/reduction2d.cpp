#include "fredsolve/reduction2d.hpp"
#include "fredsolve/errors.hpp"
#include "fredsolve/fredholm2.hpp"
#include "fredsolve/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>
#include <vector>

namespace fredsolve {

namespace {

// Runs body(k) for k in [0, count) on a few threads; each k must touch disjoint output.
template <class Body>
void parallel_for(int count, Body body) {
    const int workers = std::clamp(static_cast<int>(std::thread::hardware_concurrency()), 1, 8);
    if (workers == 1 || count < 2) {
        for (int k = 0; k < count; ++k) body(k);
        return;
    }
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t)
        pool.emplace_back([&, t] {
            for (int k = t; k < count; k += workers) body(k);
        });
    for (auto& th : pool) th.join();
}

// Green's function of d^2/dx^2 with zero values at 0 and 1.
double dirichlet_green(double x, double xi) {
    return (xi <= x ? x - xi : 0.0) - x * (1.0 - xi);
}

Kernel2D x_slice(const Fn3& tau, double y) {
    return {[tau, y](double x, double xi) { return tau(x, y, xi); }, Kink::Diagonal};
}

Kernel2D y_slice(const Fn3& tau, double x) {
    return {[tau, x](double y, double eta) { return tau(x, y, eta); }, Kink::Diagonal};
}

double weighted_norm(const Grid1D& xg, const Grid1D& yg, const Eigen::MatrixXd& v) {
    return std::sqrt(xg.w().dot(v.cwiseAbs2() * yg.w()));
}

Eigen::MatrixXd sample2d(const Grid1D& xg, const Grid1D& yg, const Fn2& f) {
    Eigen::MatrixXd v(xg.size(), yg.size());
    for (int j = 0; j < yg.size(); ++j)
        for (int i = 0; i < xg.size(); ++i) v(i, j) = f(xg.nodes[i], yg.nodes[j]);
    return v;
}

} // namespace

GridFunction2D::GridFunction2D(Grid1D xg, Grid1D yg, Eigen::MatrixXd v)
    : x_grid(std::move(xg)), y_grid(std::move(yg)), values(std::move(v)) {
    if (values.rows() != x_grid.size() || values.cols() != y_grid.size())
        throw InvalidArgument("2D grid function shape does not match its grids");
}

GridFunction2D GridFunction2D::sample(const Grid1D& xg, const Grid1D& yg, const Fn2& f) {
    return {xg, yg, sample2d(xg, yg, f)};
}

double l2_norm(const GridFunction2D& u) {
    return weighted_norm(u.x_grid, u.y_grid, u.values);
}

OdeReduction reduce_ode_volterra(const Fn1& a, const Fn1& f, int n) {
    const Grid1D g = gauss_legendre(n, 0.0, 1.0);
    const Kernel2D k{[a](double x, double xi) { return a(x) * (x - xi); }, Kink::Diagonal};
    const GridFunction psi_f = solve_volterra2(k, f, g);
    const GridFunction psi_a = solve_volterra2(k, a, g);
    const Eigen::VectorXd moment = (1.0 - g.x().array()) * g.w().array();
    const double denom = 1.0 + moment.dot(psi_a.values);
    if (std::abs(denom) < 1e-10)
        throw DegenerateProblem("constant of integration is undetermined: denominator " + std::to_string(denom));

    OdeReduction out;
    out.c0 = -moment.dot(psi_f.values) / denom;
    out.psi = GridFunction(g, psi_f.values + out.c0 * psi_a.values);
    const Grid1D lob = gauss_lobatto(n, 0.0, 1.0);
    const Kernel2D v{[](double x, double xi) { return xi <= x ? x - xi : 0.0; }, Kink::Diagonal};
    const Eigen::MatrixXd V = integral_operator(v, g, lob.nodes);
    out.u = GridFunction(lob, (V * out.psi.values).array() + out.c0);
    return out;
}

OdeReduction reduce_ode_fredholm(const Fn1& a, const Fn1& f, int n) {
    const Grid1D g = gauss_legendre(n, 0.0, 1.0);
    const Kernel2D G{[](double x, double xi) { return (xi <= x ? x - xi : 0.0) - (1.0 - xi); }, Kink::Diagonal};
    const Eigen::MatrixXd AG = integral_operator(G, g);
    const Eigen::VectorXd av = GridFunction::sample(g, a).values;
    const Eigen::MatrixXd A = av.asDiagonal() * AG;

    OdeReduction out;
    out.psi = GridFunction(g, solve_nystrom(A, GridFunction::sample(g, f).values, 1.0));
    const Grid1D lob = gauss_lobatto(n, 0.0, 1.0);
    out.u = GridFunction(lob, integral_operator(G, g, lob.nodes) * out.psi.values);
    out.c0 = out.u.values[0];
    return out;
}

Bvp2DReduction reduce_membrane() {
    Bvp2DReduction red;
    red.tau1 = [](double x, double, double xi) { return dirichlet_green(x, xi); };
    red.tau2 = [](double, double y, double eta) { return dirichlet_green(y, eta); };
    red.free_term = [](double, double y) { return 0.5 * y * (1.0 - y); };
    red.name = "membrane";
    return red;
}

Bvp2DReduction reduce_heat(const Fn1& u0) {
    if (std::abs(u0(0.0)) > 1e-8 || std::abs(u0(1.0)) > 1e-8)
        throw InvalidArgument("initial temperature must vanish at x = 0 and x = 1");
    Bvp2DReduction red;
    red.tau1 = [](double x, double, double xi) { return dirichlet_green(x, xi); };
    red.tau2 = [](double, double t, double eta) { return eta <= t ? -1.0 : 0.0; };
    red.free_term = [u0](double x, double) { return u0(x); };
    red.name = "heat";
    return red;
}

GridFunction2D reconstruct_u(const Bvp2DReduction& red, const GridFunction2D& psi, Route which) {
    const Grid1D& xg = psi.x_grid;
    const Grid1D& yg = psi.y_grid;
    const Grid1D xo = gauss_lobatto(xg.size(), xg.a, xg.b);
    const Grid1D yo = gauss_lobatto(yg.size(), yg.a, yg.b);
    Eigen::MatrixXd u(xo.size(), yo.size());

    if (which == Route::X || which == Route::XCorrected) {
        // psi(xi_k, yo_b) by interpolation in y, then the x-integral on each output row.
        const Eigen::MatrixXd py = psi.values * interpolation_matrix(yg, yo.nodes).transpose();
        parallel_for(yo.size(), [&](int b) {
            u.col(b) = integral_operator(x_slice(red.tau1, yo.nodes[b]), xg, xo.nodes) * py.col(b);
        });
        if (which == Route::XCorrected) {
            const Eigen::VectorXd u0 = u.col(0), u1 = u.col(yo.size() - 1);
            for (int b = 0; b < yo.size(); ++b) u.col(b) -= (1.0 - yo.nodes[b]) * u0 + yo.nodes[b] * u1;
        }
    } else {
        const Eigen::MatrixXd px = interpolation_matrix(xg, xo.nodes) * psi.values;
        parallel_for(xo.size(), [&](int a) {
            const Eigen::VectorXd s =
                integral_operator(y_slice(red.tau2, xo.nodes[a]), yg, yo.nodes) * px.row(a).transpose();
            for (int b = 0; b < yo.size(); ++b) u(a, b) = red.free_term(xo.nodes[a], yo.nodes[b]) - s[b];
        });
        if (which == Route::YCorrected) {
            const Eigen::RowVectorXd u0 = u.row(0), u1 = u.row(xo.size() - 1);
            for (int a = 0; a < xo.size(); ++a) u.row(a) -= (1.0 - xo.nodes[a]) * u0 + xo.nodes[a] * u1;
        }
    }
    return {xo, yo, u};
}

double closure_delta(const GridFunction2D& U1, const GridFunction2D& U2) {
    if (U1.values.rows() != U2.values.rows() || U1.values.cols() != U2.values.cols())
        throw InvalidArgument("closure_delta needs fields on the same grid");
    const double den = weighted_norm(U1.x_grid, U1.y_grid, U1.values + U2.values);
    if (den < 1e-14) throw UndefinedDelta("closure delta is undefined: ||U1 + U2|| is zero");
    return 2.0 * weighted_norm(U1.x_grid, U1.y_grid, U1.values - U2.values) / den;
}

Eigen::MatrixXd assemble2d(const Bvp2DReduction& red, const Grid1D& xg, const Grid1D& yg) {
    const int nx = xg.size(), ny = yg.size();
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(nx) * ny,
                                              static_cast<Eigen::Index>(nx) * ny);
    // Unknown (i, j) sits at i + nx * j.
    parallel_for(ny, [&](int j) {
        M.block(nx * j, nx * j, nx, nx) = integral_operator(x_slice(red.tau1, yg.nodes[j]), xg);
    });
    parallel_for(nx, [&](int i) {
        const Eigen::MatrixXd A2 = integral_operator(y_slice(red.tau2, xg.nodes[i]), yg);
        for (int j = 0; j < ny; ++j)
            for (int l = 0; l < ny; ++l) M(i + nx * j, i + nx * l) += A2(j, l);
    });
    return M;
}

Eigen::MatrixXd assemble2d_K(const Bvp2DReduction& red, const Grid1D& xg, const Grid1D& yg,
                             const MethodParams& params) {
    Eigen::MatrixXd A = assemble2d(red, xg, yg);
    const double lam = params.poisson.lambda;
    if (lam == 0.0) return A;
    const int nx = xg.size();
    const Eigen::MatrixXd HG = peaked_operator(resolvent_H_kernel(params.poisson), xg, xg.nodes, params.poisson.r);
    parallel_for(yg.size(), [&](int j) {
        auto rows = A.middleRows(static_cast<Eigen::Index>(nx) * j, nx);
        rows += lam * (HG * rows);
    });
    return A;
}

Method2DResult method2d_solve(const Bvp2DReduction& red, const Method2DParams& params) {
    const MethodParams& mp = params.base;
    const PoissonParams& p = mp.poisson;
    require_valid_lambda(p, mp.min_rel_dist);
    if (params.nx < 2 || params.ny < 2) throw InvalidArgument("2D grid needs at least 2 points per side");
    if (static_cast<long>(params.nx) * params.ny > kMax2DUnknowns)
        throw ProblemTooLarge("2D grid " + std::to_string(params.nx) + "x" + std::to_string(params.ny) +
                              " exceeds " + std::to_string(kMax2DUnknowns) + " unknowns");

    const Grid1D xg = gauss_legendre(params.nx, 0.0, 1.0);
    const Grid1D yg = gauss_legendre(params.ny, 0.0, 1.0);
    const Grid1D xm = gauss_legendre(params.nx, -1.0, 0.0);
    const Eigen::MatrixXd K = assemble2d_K(red, xg, yg, mp);
    const Eigen::MatrixXd HG = peaked_operator(resolvent_H_kernel(p), xg, xg.nodes, p.r);
    const Eigen::MatrixXd hop = peaked_operator(poisson_kernel(p), xg, xm.nodes, p.r);
    const Eigen::MatrixXd Lop = peaked_operator(resolvent_L_kernel(p), xm, xm.nodes, p.r);
    const Eigen::MatrixXd Hneg = peaked_operator(resolvent_H_kernel(p), xm, xg.nodes, p.r);
    const auto vec = [](const Eigen::MatrixXd& m) { return Eigen::Map<const Eigen::VectorXd>(m.data(), m.size()); };
    const auto mat = [&](const Eigen::VectorXd& v) {
        return Eigen::Map<const Eigen::MatrixXd>(v.data(), params.nx, params.ny).eval();
    };

    // y enters only as a parameter: every stage acts column by column.
    const Eigen::MatrixXd f = sample2d(xg, yg, red.free_term);
    const Eigen::MatrixXd F1 = -mp.mu * (f + p.lambda * (HG * f));
    const Eigen::MatrixXd psi1 = mat(solve_nystrom(K, vec(F1), mp.mu));
    const Eigen::MatrixXd rho = -p.lambda * (hop * psi1);
    const Eigen::MatrixXd kappa = rho + p.Lambda * (Lop * rho);
    const Eigen::MatrixXd F0 = p.lambda * (Hneg * kappa);
    const Eigen::MatrixXd psi0 = mat(solve_nystrom(K, vec(F0), mp.mu));

    Method2DResult out;
    out.psi1 = GridFunction2D(xg, yg, psi1);
    out.psi0 = GridFunction2D(xg, yg, psi0);
    out.psi = GridFunction2D(xg, yg, psi0 + psi1);
    out.residual = verify2d(red, out.psi);
    return out;
}

ResidualReport verify2d(const Bvp2DReduction& red, const GridFunction2D& psi, double threshold) {
    const Grid1D& xg = psi.x_grid;
    const Grid1D& yg = psi.y_grid;
    const Eigen::MatrixXd A = assemble2d(red, xg, yg);
    const Eigen::MatrixXd f = sample2d(xg, yg, red.free_term);
    const Eigen::VectorXd r =
        A * Eigen::Map<const Eigen::VectorXd>(psi.values.data(), psi.values.size()) -
        Eigen::Map<const Eigen::VectorXd>(f.data(), f.size());
    const Eigen::MatrixXd rm = Eigen::Map<const Eigen::MatrixXd>(r.data(), xg.size(), yg.size());
    return classify_residual(weighted_norm(xg, yg, rm), weighted_norm(xg, yg, f), threshold);
}

ResidualReport verify2d(const Bvp2DReduction& red, const Fn2& psi, const Grid1D& xg, const Grid1D& yg,
                        double threshold, int quad_order) {
    const Eigen::MatrixXd f = sample2d(xg, yg, red.free_term);
    Eigen::MatrixXd r(xg.size(), yg.size());
    parallel_for(yg.size(), [&](int j) {
        const double y = yg.nodes[j];
        for (int i = 0; i < xg.size(); ++i) {
            const double x = xg.nodes[i];
            const double s1 = apply_kernel(x_slice(red.tau1, y), [&](double xi) { return psi(xi, y); }, x,
                                           0.0, 1.0, quad_order);
            const double s2 = apply_kernel(y_slice(red.tau2, x), [&](double eta) { return psi(x, eta); }, y,
                                           0.0, 1.0, quad_order);
            r(i, j) = s1 + s2 - f(i, j);
        }
    });
    return classify_residual(weighted_norm(xg, yg, r), weighted_norm(xg, yg, f), threshold);
}

} // namespace fredsolve
