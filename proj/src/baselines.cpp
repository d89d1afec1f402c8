#include "fredsolve/baselines.hpp"
#include "fredsolve/errors.hpp"
#include "fredsolve/fredholm2.hpp"

#include <boost/math/tools/toms748_solve.hpp>
#include <cmath>
#include <cstdio>
#include <functional>

namespace fredsolve {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

Eigen::VectorXd start_vector(const Grid1D& g, const std::optional<Fn1>& psi0) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(g.size());
    if (psi0)
        for (int i = 0; i < g.size(); ++i) v[i] = (*psi0)(g.nodes[i]);
    return v;
}

Eigen::VectorXd solve_checked(const Eigen::MatrixXd& M, const Eigen::VectorXd& b, const char* what) {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
    const double smax = largest_singular_value(M);
    const double smin = smallest_singular_value(M);
    if (!(smin > kOnSpectrumRelTol * smax))
        throw SingularSystem(std::string(what) + ": system matrix is numerically singular");
    return lu.solve(b);
}

using Step = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

IterationHistory run(const Discretization& d, Eigen::VectorXd psi, int max_iter, const std::optional<StopRule>& stop,
                     const Step& step) {
    if (max_iter < 1) throw InvalidArgument("max_iter must be at least 1");
    IterationHistory h;
    h.grid = d.grid;
    auto residual = [&](const Eigen::VectorXd& v) { return l2_norm(d.grid, d.A * v - d.f); };
    h.iterates.push_back(psi);
    h.residuals.push_back(residual(psi));
    const double thresh = stop ? stop->c1 * stop->delta + stop->c2 * stop->gamma : 0.0;
    for (int it = 0; it < max_iter; ++it) {
        Eigen::VectorXd next = step(h.iterates.back());
        if (next.size() == 0) {  // step signals convergence
            h.converged = true;
            break;
        }
        const double move = l2_norm(d.grid, next - h.iterates.back());
        h.iterates.push_back(std::move(next));
        h.residuals.push_back(residual(h.iterates.back()));
        if (stop && move <= thresh) {
            h.stop_index = it;
            break;
        }
    }
    return h;
}

void check_fridman_step(const Discretization& d, const FirstKindProblem& problem, double step) {
    const double lam1 = smallest_char_number(problem.kernel, d.grid);
    if (!(lam1 > 0.0)) throw InvalidArgument("Fridman iteration needs a positive definite kernel");
    if (!(step > 0.0 && step < 2.0 * lam1))
        throw InvalidArgument("Fridman step must satisfy 0 < step < 2 lambda_1; measured lambda_1 = " + fmt(lam1) +
                              ", step = " + fmt(step));
}

} // namespace

Discretization discretize(const FirstKindProblem& problem, int n) {
    Discretization d;
    d.grid = gauss_legendre(n, 0.0, 1.0);
    d.A = integral_operator(problem.kernel, d.grid);
    d.f.resize(n);
    for (int i = 0; i < n; ++i) d.f[i] = problem.free_term(d.grid.nodes[i]);
    return d;
}

Eigen::MatrixXd weighted_adjoint(const Eigen::MatrixXd& A, const Grid1D& g) {
    return g.w().cwiseInverse().asDiagonal() * A.transpose() * g.w().asDiagonal();
}

double weighted_operator_norm(const Eigen::MatrixXd& M, const Grid1D& g, int iters, double tol) {
    const Eigen::VectorXd sw = g.w().cwiseSqrt();
    const Eigen::MatrixXd S = sw.asDiagonal() * M * sw.cwiseInverse().asDiagonal();
    return largest_singular_value(S, iters, tol);
}

double smallest_char_number(const Kernel2D& k, const Grid1D& g) {
    const SpectrumEstimate sp = estimate_spectrum(k, g, 1);
    if (sp.char_numbers.empty()) throw InvalidArgument("kernel has no nonzero eigenvalues on the grid");
    return sp.char_numbers.front();
}

GridFunction tikhonov_weighted(const FirstKindProblem& problem, double alpha, const Fn1& p0, int n) {
    if (!(alpha > 0.0)) throw InvalidArgument("alpha must be positive");
    const Discretization d = discretize(problem, n);
    Eigen::VectorXd p(n);
    for (int i = 0; i < n; ++i) {
        p[i] = p0(d.grid.nodes[i]);
        if (!(p[i] > 0.0)) throw InvalidArgument("stabilizer weight p0 must be positive on the grid");
    }
    Eigen::MatrixXd M = d.A;
    M.diagonal() += alpha * p;
    return {d.grid, solve_checked(M, d.f, "Tikhonov")};
}

GridFunction lavrentiev(const FirstKindProblem& problem, double alpha, int n) {
    return tikhonov_weighted(problem, alpha, [](double) { return 1.0; }, n);
}

IterationHistory fridman_iterate(const FirstKindProblem& problem, double lambda_step, const std::optional<Fn1>& psi0,
                                 int max_iter, const std::optional<StopRule>& stop, int n) {
    const Discretization d = discretize(problem, n);
    check_fridman_step(d, problem, lambda_step);
    return run(d, start_vector(d.grid, psi0), max_iter, stop,
               [&](const Eigen::VectorXd& v) -> Eigen::VectorXd { return v + lambda_step * (d.f - d.A * v); });
}

IterationHistory krasnoselskii_iterate(const FirstKindProblem& problem, double nu, const std::optional<Fn1>& psi0,
                                       int max_iter, const std::optional<StopRule>& stop, int n) {
    const Discretization d = discretize(problem, n);
    const Eigen::MatrixXd As = weighted_adjoint(d.A, d.grid);
    const Eigen::MatrixXd A1 = As * d.A;
    const Eigen::VectorXd f1 = As * d.f;
    const double norm = weighted_operator_norm(A1, d.grid);
    if (!(nu > 0.0 && nu < 2.0 / norm))
        throw InvalidArgument("Krasnoselskii step must satisfy 0 < nu < 2/||A*A||; ||A*A|| = " + fmt(norm) +
                              ", nu = " + fmt(nu));
    return run(d, start_vector(d.grid, psi0), max_iter, stop,
               [&](const Eigen::VectorXd& v) -> Eigen::VectorXd { return v - nu * (A1 * v) + nu * f1; });
}

GridFunction averaged_iterate(const FirstKindProblem& problem, const std::optional<Fn1>& phi0, int m, int n) {
    if (m < 0) throw InvalidArgument("averaging length m must be nonnegative");
    const Discretization d = discretize(problem, n);
    check_fridman_step(d, problem, 1.0);
    Eigen::VectorXd phi = start_vector(d.grid, phi0);
    Eigen::VectorXd sum = phi;
    for (int k = 1; k <= m; ++k) {
        phi = phi + d.f - d.A * phi;
        sum += phi;
    }
    return {d.grid, sum / (m + 1.0)};
}

IterationHistory implicit_iterate(const FirstKindProblem& problem, double alpha, const std::optional<Fn1>& psi0,
                                  int max_iter, const std::optional<StopRule>& stop, int n) {
    if (!(alpha > 0.0)) throw InvalidArgument("alpha must be positive");
    const Discretization d = discretize(problem, n);
    Eigen::MatrixXd M = d.A;
    M.diagonal().array() += alpha;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
    if (!(smallest_singular_value(M) > kOnSpectrumRelTol * largest_singular_value(M)))
        throw SingularSystem("implicit iteration: alpha I + A is numerically singular");
    return run(d, start_vector(d.grid, psi0), max_iter, stop,
               [&](const Eigen::VectorXd& v) -> Eigen::VectorXd { return lu.solve(alpha * v + d.f); });
}

IterationHistory steepest_descent(const FirstKindProblem& problem, const std::optional<Fn1>& psi0, int max_iter,
                                  const std::optional<StopRule>& stop, int n) {
    const Discretization d = discretize(problem, n);
    const Eigen::MatrixXd As = weighted_adjoint(d.A, d.grid);
    const double scale = std::max(l2_norm(d.grid, As * d.f), 1e-300);
    return run(d, start_vector(d.grid, psi0), max_iter, stop, [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
        const Eigen::VectorXd g = As * (d.A * v - d.f);
        const double gn = l2_norm(d.grid, g);
        if (gn <= 1e-13 * scale) return {};
        const double Ag = l2_norm(d.grid, d.A * g);
        if (Ag == 0.0) return {};
        const double beta = gn * gn / (Ag * Ag);
        return v - beta * g;
    });
}

GridFunction quasisolution(const FirstKindProblem& problem, double R, int n) {
    if (!(R > 0.0)) throw InvalidRadius("quasisolution radius must be positive");
    const Discretization d = discretize(problem, n);
    const SpectrumEstimate sp = estimate_spectrum(problem.kernel, d.grid, n);
    const std::size_t m = sp.char_numbers.size();
    Eigen::VectorXd c(static_cast<Eigen::Index>(m)), lam(static_cast<Eigen::Index>(m));
    for (std::size_t k = 0; k < m; ++k) {
        c[k] = d.grid.w().dot(d.f.cwiseProduct(sp.eigenfunctions[k].values));
        lam[k] = sp.char_numbers[k];
    }
    auto coeffs = [&](double nu) -> Eigen::VectorXd {
        return (c.array() * lam.array() / (1.0 + nu * lam.array().square())).matrix();
    };
    Eigen::VectorXd a = coeffs(0.0);
    if (a.squaredNorm() > R * R) {
        // Norm of the constrained expansion decreases monotonically in nu.
        auto excess = [&](double nu) { return coeffs(nu).squaredNorm() - R * R; };
        double hi = 1.0 / lam.cwiseAbs2().maxCoeff();
        int grow = 0;
        while (excess(hi) > 0.0) {
            hi *= 4.0;
            if (++grow > 400) throw InvalidRadius("quasisolution multiplier could not be bracketed");
        }
        boost::uintmax_t iters = 200;
        const auto root = boost::math::tools::toms748_solve(
            excess, 0.0, hi, excess(0.0), excess(hi),
            [](double lo, double up) { return std::abs(up - lo) <= 1e-15 * std::max(std::abs(up), 1e-300); }, iters);
        a = coeffs(0.5 * (root.first + root.second));
    }
    Eigen::VectorXd psi = Eigen::VectorXd::Zero(n);
    for (std::size_t k = 0; k < m; ++k) psi += a[k] * sp.eigenfunctions[k].values;
    return {d.grid, psi};
}

std::optional<int> stopping_rule(const IterationHistory& history, double delta, double gamma, double c1, double c2) {
    if (history.iterates.size() < 2) throw InvalidArgument("stopping rule needs at least two iterates");
    const double thresh = c1 * delta + c2 * gamma;
    for (std::size_t k = 0; k + 1 < history.iterates.size(); ++k)
        if (l2_norm(history.grid, history.iterates[k + 1] - history.iterates[k]) <= thresh)
            return static_cast<int>(k);
    return std::nullopt;
}

} // namespace fredsolve
