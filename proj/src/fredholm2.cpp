#include "fredsolve/fredholm2.hpp"
#include "fredsolve/errors.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdio>

namespace fredsolve {

namespace {

Eigen::VectorXd sample(const Grid1D& g, const Fn1& f) {
    Eigen::VectorXd v(g.size());
    for (int i = 0; i < g.size(); ++i) v[i] = f(g.nodes[i]);
    return v;
}

double smallest_sv_lu(const Eigen::PartialPivLU<Eigen::MatrixXd>& lu, int n, int iters, double tol) {
    Eigen::VectorXd v = Eigen::VectorXd::Ones(n).normalized();
    double est = 0.0;
    for (int it = 0; it < iters; ++it) {
        Eigen::VectorXd y = lu.transpose().solve(v);
        Eigen::VectorXd z = lu.solve(y);
        const double nz = z.norm();
        if (!std::isfinite(nz) || nz == 0.0) return 0.0;
        const double next = 1.0 / std::sqrt(nz);
        v = z / nz;
        if (it > 0 && std::abs(next - est) <= tol * next) return next;
        est = next;
    }
    return est;
}

} // namespace

double largest_singular_value(const Eigen::MatrixXd& M, int iters, double tol) {
    if (M.size() == 0) return 0.0;
    Eigen::VectorXd v = Eigen::VectorXd::Ones(M.cols()).normalized();
    double est = 0.0;
    for (int it = 0; it < iters; ++it) {
        Eigen::VectorXd z = M.transpose() * (M * v);
        const double nz = z.norm();
        if (nz == 0.0) return 0.0;
        const double next = std::sqrt(nz);
        v = z / nz;
        if (it > 0 && std::abs(next - est) <= tol * next) return next;
        est = next;
    }
    return est;
}

double smallest_singular_value(const Eigen::MatrixXd& M, int iters, double tol) {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
    return smallest_sv_lu(lu, static_cast<int>(M.rows()), iters, tol);
}

double condition_number(const Eigen::MatrixXd& M) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
    const auto& s = svd.singularValues();
    return s[0] / s[s.size() - 1];
}

Eigen::VectorXd solve_nystrom(const Eigen::MatrixXd& A, const Eigen::VectorXd& F, double mu,
                              double rel_tol) {
    const Eigen::Index n = A.rows();
    const Eigen::MatrixXd M = Eigen::MatrixXd::Identity(n, n) - mu * A;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
    const double smax = largest_singular_value(M);
    const double smin = smallest_sv_lu(lu, static_cast<int>(n), 50, 1e-10);
    if (smin <= rel_tol * smax) {
        char buf[200];
        std::snprintf(buf, sizeof buf,
                      "mu = %.17g lies on the spectrum: smallest singular value %.3g vs norm %.3g", mu,
                      smin, smax);
        throw OnSpectrum(mu, smin, buf);
    }
    return lu.solve(F);
}

GridFunction solve_direct(const SecondKindSystem& sys) {
    const Eigen::MatrixXd A = integral_operator(sys.kernel, sys.grid);
    return {sys.grid, solve_nystrom(A, sample(sys.grid, sys.free_term), sys.mu)};
}

GridFunction neumann_iterate(const SecondKindSystem& sys, int max_iter, double tol) {
    const Grid1D& g = sys.grid;
    const int n = g.size();
    double c1sq = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double k = sys.kernel(g.nodes[i], g.nodes[j]);
            c1sq += g.weights[i] * g.weights[j] * k * k;
        }
    const double c1 = std::sqrt(c1sq);
    if (std::abs(sys.mu) * c1 >= 1.0) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "simple iteration needs |mu| c1 < 1; measured c1 = %.6g, |mu| c1 = %.6g",
                      c1, std::abs(sys.mu) * c1);
        throw ContractionViolated(c1, buf);
    }
    const Eigen::MatrixXd A = sys.mu * integral_operator(sys.kernel, g);
    const Eigen::VectorXd F = sample(g, sys.free_term);
    Eigen::VectorXd psi = F;
    for (int it = 0; it < max_iter; ++it) {
        Eigen::VectorXd next = A * psi + F;
        const double diff = l2_norm(g, next - psi);
        psi = std::move(next);
        if (diff <= tol) break;
    }
    return {g, psi};
}

SpectrumEstimate estimate_spectrum(const Kernel2D& kernel, const Grid1D& grid, int count) {
    const int n = grid.size();
    Eigen::MatrixXd K(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) K(i, j) = kernel(grid.nodes[i], grid.nodes[j]);
    if ((K - K.transpose()).cwiseAbs().maxCoeff() >= 1e-8)
        throw InvalidArgument("estimate_spectrum needs a symmetric kernel");
    const Eigen::VectorXd sw = grid.w().cwiseSqrt();
    Eigen::MatrixXd S = sw.asDiagonal() * K * sw.asDiagonal();
    if (kernel.kink != Kink::None) {
        // Product integration restores accuracy at the kink; symmetrize its weighted form.
        const Eigen::MatrixXd A = integral_operator(kernel, grid);
        S = sw.asDiagonal() * A * sw.cwiseInverse().asDiagonal();
        S = 0.5 * (S + S.transpose()).eval();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
    const Eigen::VectorXd& ev = es.eigenvalues();
    const double scale = ev.cwiseAbs().maxCoeff();

    std::vector<int> order;
    for (int i = 0; i < n; ++i)
        if (std::abs(ev[i]) > 1e-12 * scale && scale > 0.0) order.push_back(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return std::abs(ev[a]) > std::abs(ev[b]); });
    if (static_cast<int>(order.size()) > count) order.resize(count);

    SpectrumEstimate out;
    for (int i : order) {
        out.char_numbers.push_back(1.0 / ev[i]);
        Eigen::VectorXd v = es.eigenvectors().col(i).cwiseQuotient(sw);
        v /= l2_norm(grid, v);
        out.eigenfunctions.emplace_back(grid, v);
    }
    return out;
}

GridFunction deflate_on_spectrum(const GridFunction& f, const GridFunction& eig) {
    const double c = f.grid.w().dot(f.values.cwiseProduct(eig.values));
    return {f.grid, f.values - c * eig.values};
}

GridFunction solve_volterra2(const Kernel2D& kernel, const Fn1& f, const Grid1D& grid) {
    const Kernel2D lower{[kernel](double x, double xi) { return xi > x ? 0.0 : kernel(x, xi); },
                         Kink::Diagonal};
    const Eigen::MatrixXd A = integral_operator(lower, grid);
    const int n = grid.size();
    const Eigen::MatrixXd M = Eigen::MatrixXd::Identity(n, n) - A;
    return {grid, M.partialPivLu().solve(sample(grid, f))};
}

} // namespace fredsolve
