#include "fredsolve/method.hpp"
#include "fredsolve/errors.hpp"
#include "fredsolve/fredholm2.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

namespace fredsolve {

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::VectorXd sample(const Grid1D& g, const Fn1& f) {
    Eigen::VectorXd v(g.size());
    for (int i = 0; i < g.size(); ++i) v[i] = f(g.nodes[i]);
    return v;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void check_r1_lambda(double lambda, double min_rel_dist) {
    if (std::abs(lambda) < min_rel_dist)
        throw ParameterExclusion("0", 0, 0.0, "lambda = " + fmt(lambda) + " is excluded: too close to 0");
    const struct {
        const char* name;
        double v;
    } excluded[] = {{"r^-n", 1.0}, {"r^-n/2", 0.5}, {"(-1+sqrt2)r^-n", -1.0 + std::numbers::sqrt2},
                    {"(-1-sqrt2)r^-n", -1.0 - std::numbers::sqrt2}};
    for (const auto& e : excluded)
        if (std::abs(lambda - e.v) / std::abs(e.v) < min_rel_dist)
            throw ParameterExclusion(e.name, 0, e.v,
                                     "lambda = " + fmt(lambda) + " is excluded at r = 1: family " + e.name);
}

} // namespace

std::string to_string(Solvable s) {
    switch (s) {
    case Solvable::Yes: return "yes";
    case Solvable::No: return "no";
    case Solvable::Unknown: return "unknown";
    }
    return "unknown";
}

Grid1D method_grid(const MethodParams& params) {
    return gauss_legendre(params.quad_order, 0.0, 1.0);
}

Grid1D method_grid_negative(const MethodParams& params) {
    return gauss_legendre(params.quad_order, -1.0, 0.0);
}

Eigen::MatrixXd peaked_operator(const Kernel2D& k, const Grid1D& src, const std::vector<double>& x_out,
                                double r) {
    // Peak half-width of the Poisson kernel in units of the period.
    const double s = std::log(1.0 / r) / (2.0 * kPi);
    const int panels = std::clamp(static_cast<int>(std::ceil((src.b - src.a) / (1.5 * s))), 1, 128);
    const Grid1D fine = composite_gauss(24, panels, src.a, src.b);
    const Eigen::MatrixXd P = interpolation_matrix(src, fine.nodes);
    Eigen::MatrixXd Kw(static_cast<Eigen::Index>(x_out.size()), fine.size());
    for (std::size_t i = 0; i < x_out.size(); ++i)
        for (int q = 0; q < fine.size(); ++q)
            Kw(static_cast<Eigen::Index>(i), q) = k(x_out[i], fine.nodes[q]) * fine.weights[q];
    return Kw * P;
}

Kernel2D build_K(const Kernel2D& k, const MethodParams& params) {
    const PoissonParams p = params.poisson;
    const int order = std::max(16, params.quad_order / 4);
    // Refine towards the peak of H at zeta = x and its periodic images.
    const double finest = std::max(0.5 * (1.0 - p.r), 1e-6);
    auto eval = [k, p, order, finest](double x, double xi) {
        if (p.lambda == 0.0) return k(x, xi);
        std::vector<double> centers;
        for (double c : {x - 1.0, x, x + 1.0}) centers.push_back(std::clamp(c, 0.0, 1.0));
        if (k.kink == Kink::Diagonal) centers.push_back(xi);
        const Grid1D q = graded_gauss(order, centers, finest, 0.0, 1.0);
        double s = 0.0;
        for (int j = 0; j < q.size(); ++j) s += q.weights[j] * resolvent_H(x, q.nodes[j], p) * k(q.nodes[j], xi);
        return k(x, xi) + p.lambda * s;
    };
    return {eval, k.kink};
}

Eigen::MatrixXd build_K_operator(const Kernel2D& k, const MethodParams& params) {
    const Grid1D g = method_grid(params);
    const Eigen::MatrixXd Ak = integral_operator(k, g);
    if (params.poisson.lambda == 0.0) return Ak;
    const Eigen::MatrixXd HG = peaked_operator(resolvent_H_kernel(params.poisson), g, g.nodes, params.poisson.r);
    return Ak + params.poisson.lambda * HG * Ak;
}

double select_mu(const FirstKindProblem& problem, const MethodParams& params,
                 const std::vector<double>& candidates) {
    if (candidates.empty()) throw InvalidArgument("select_mu needs at least one candidate");
    const Eigen::MatrixXd AK = build_K_operator(problem.kernel, params);
    const Eigen::Index n = AK.rows();
    std::string probed;
    for (double mu : candidates) {
        const Eigen::MatrixXd M = Eigen::MatrixXd::Identity(n, n) - mu * AK;
        const double smax = largest_singular_value(M);
        const double smin = smallest_singular_value(M);
        if (smin > 1e-6 * smax) return mu;
        probed += (probed.empty() ? "" : ", ") + fmt(mu);
    }
    throw NoValidMu("no admissible mu among the candidates {" + probed + "}");
}

GridFunction build_F1(const Fn1& f, const MethodParams& params) {
    const Grid1D g = method_grid(params);
    const Eigen::VectorXd fv = sample(g, f);
    const double lam = params.poisson.lambda;
    Eigen::VectorXd F1 = fv;
    if (lam != 0.0) {
        const Eigen::MatrixXd HG = peaked_operator(resolvent_H_kernel(params.poisson), g, g.nodes, params.poisson.r);
        F1 += lam * HG * fv;
    }
    return {g, -params.mu * F1};
}

GridFunction solve_psi1(const FirstKindProblem& problem, const MethodParams& params) {
    const Eigen::MatrixXd AK = build_K_operator(problem.kernel, params);
    const GridFunction F1 = build_F1(problem.free_term, params);
    return {F1.grid, solve_nystrom(AK, F1.values, params.mu)};
}

GridFunction build_rho(const GridFunction& psi1, const MethodParams& params) {
    const Grid1D gm = method_grid_negative(params);
    const Eigen::MatrixXd hop = peaked_operator(poisson_kernel(params.poisson), psi1.grid, gm.nodes, params.poisson.r);
    return {gm, -params.poisson.lambda * (hop * psi1.values)};
}

GridFunction build_kappa(const GridFunction& rho, const MethodParams& params) {
    const Eigen::MatrixXd Lop =
        peaked_operator(resolvent_L_kernel(params.poisson), rho.grid, rho.grid.nodes, params.poisson.r);
    return {rho.grid, rho.values + params.poisson.Lambda * (Lop * rho.values)};
}

GridFunction build_F0(const GridFunction& kappa, const MethodParams& params) {
    const Grid1D g = method_grid(params);
    const Eigen::MatrixXd Hop =
        peaked_operator(resolvent_H_kernel(params.poisson), kappa.grid, g.nodes, params.poisson.r);
    return {g, params.poisson.lambda * (Hop * kappa.values)};
}

PipelineState method_v2(const FirstKindProblem& problem, const MethodParams& params) {
    require_valid_lambda(params.poisson, params.min_rel_dist);
    const Eigen::MatrixXd AK = build_K_operator(problem.kernel, params);
    PipelineState st;
    st.F1 = build_F1(problem.free_term, params);
    st.psi1 = GridFunction(st.F1.grid, solve_nystrom(AK, st.F1.values, params.mu));
    st.rho = build_rho(st.psi1, params);
    st.kappa = build_kappa(st.rho, params);
    st.F0 = build_F0(st.kappa, params);
    // Same kernel K and the same mu as the psi1 solve; only the free term differs.
    st.psi0 = GridFunction(st.F0.grid, solve_nystrom(AK, st.F0.values, params.mu));
    st.psi = GridFunction(st.psi1.grid, st.psi0.values + st.psi1.values);
    st.residual_l2 = verify_solution(problem, st.psi).residual_l2;
    return st;
}

GridFunction method_v2_single(const GridFunction& psi1, const MethodParams& params) {
    const Grid1D g = method_grid(params);
    const PoissonParams& p = params.poisson;
    const Eigen::MatrixXd lop = peaked_operator(kernel_l_kernel(p), psi1.grid, g.nodes, p.r);
    const Eigen::VectorXd fprime = -p.lambda * (lop * psi1.values);
    const Eigen::MatrixXd Lop = peaked_operator(resolvent_L_kernel(p), g, g.nodes, p.r);
    return {g, fprime + p.Lambda * (Lop * fprime)};
}

GridFunction method_v2_single(const FirstKindProblem& problem, const MethodParams& params) {
    require_valid_lambda(params.poisson, params.min_rel_dist);
    return method_v2_single(solve_psi1(problem, params), params);
}

double v1_sigma(double mu, double lambda) {
    const double l2 = lambda * lambda;
    return -mu * l2 * (1.0 - lambda) / ((1.0 - 2.0 * lambda) * (1.0 - 2.0 * lambda - l2));
}

FourierState method_v1(const FirstKindProblem& problem, const MethodParams& params, int N) {
    const double lam = params.poisson.lambda, mu = params.mu;
    check_r1_lambda(lam, params.min_rel_dist);
    if (N < 1) throw InvalidArgument("Fourier truncation N must be at least 1");

    FourierState st;
    st.c = fourier_coeffs(problem.free_term, N, params.quad_order);
    st.p = kernel_fourier_coeffs(problem.kernel, N, params.quad_order);
    st.sigma = v1_sigma(mu, lam);

    const double g = mu * (1.0 - lam);
    const double d = 2.0 * (1.0 - 2.0 * lam);
    const KernelFourier& p = st.p;
    const int n = 2 * N + 1;
    // Unknown ordering: s0, s_1..s_N, s'_1..s'_N.
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd rhs(n);
    M(0, 0) = d - g * p.p00;
    M.block(0, 1, 1, N) = -2.0 * g * p.p0m.transpose();
    M.block(0, N + 1, 1, N) = -2.0 * g * p.p0m_prime.transpose();
    rhs[0] = -2.0 * g * st.c.c0;
    M.block(1, 0, N, 1) = -g * p.p0n;
    M.block(1, 1, N, N) = -2.0 * g * p.pnm;
    M.block(1, N + 1, N, N) = -2.0 * g * p.pnm_p;
    M.block(N + 1, 0, N, 1) = -g * p.p0n_prime;
    M.block(N + 1, 1, N, N) = -2.0 * g * p.pnm_pp;
    M.block(N + 1, N + 1, N, N) = -2.0 * g * p.pnm_ppp;
    M.diagonal().tail(2 * N).array() += d;
    rhs.segment(1, N) = -2.0 * g * st.c.cn;
    rhs.segment(N + 1, N) = -2.0 * g * st.c.cn_prime;

    Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
    const double smax = largest_singular_value(M);
    const double smin = smallest_singular_value(M);
    if (!(smin > 1e-12 * smax))
        throw NoValidMu("truncated Fourier system is singular for mu = " + fmt(mu) + ", lambda = " + fmt(lam));
    const Eigen::VectorXd sol = lu.solve(rhs);
    st.s.c0 = sol[0];
    st.s.cn = sol.segment(1, N);
    st.s.cn_prime = sol.segment(N + 1, N);

    // b: Fourier coefficients of A psi1 - f.
    st.b.c0 = 0.5 * p.p00 * st.s.c0 + p.p0m.dot(st.s.cn) + p.p0m_prime.dot(st.s.cn_prime) - st.c.c0;
    st.b.cn = 0.5 * p.p0n * st.s.c0 + p.pnm * st.s.cn + p.pnm_p * st.s.cn_prime - st.c.cn;
    st.b.cn_prime = 0.5 * p.p0n_prime * st.s.c0 + p.pnm_pp * st.s.cn + p.pnm_ppp * st.s.cn_prime - st.c.cn_prime;

    const double af = mu * lam / (1.0 - 2.0 * lam);
    st.a.c0 = af * st.b.c0;
    st.a.cn = af * st.b.cn;
    st.a.cn_prime = af * st.b.cn_prime;
    st.t.c0 = st.sigma * st.b.c0;
    st.t.cn = st.sigma * st.b.cn;
    st.t.cn_prime = st.sigma * st.b.cn_prime;
    return st;
}

double fourier_eval(const FourierCoeffs& c, double x) {
    double s = 0.5 * c.c0;
    for (int n = 1; n <= c.N(); ++n)
        s += c.cn[n - 1] * std::cos(2.0 * n * kPi * x) + c.cn_prime[n - 1] * std::sin(2.0 * n * kPi * x);
    return s;
}

GridFunction fourier_sample(const FourierCoeffs& c, const Grid1D& g) {
    return GridFunction::sample(g, [&c](double x) { return fourier_eval(c, x); });
}

ResidualReport classify_residual(double residual_l2, double free_term_l2, double threshold) {
    ResidualReport rep;
    rep.residual_l2 = residual_l2;
    if (free_term_l2 > 0.0) rep.relative = residual_l2 / free_term_l2;
    else rep.relative = residual_l2 > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    if (rep.relative > threshold) rep.solvable = Solvable::No;
    else if (rep.relative < threshold / 10.0) rep.solvable = Solvable::Yes;
    else rep.solvable = Solvable::Unknown;
    return rep;
}

ResidualReport verify_solution(const FirstKindProblem& problem, const GridFunction& psi, double threshold) {
    const Grid1D& g = psi.grid;
    const Eigen::VectorXd fv = sample(g, problem.free_term);
    const Eigen::VectorXd r = integral_operator(problem.kernel, g) * psi.values - fv;
    return classify_residual(l2_norm(g, r), l2_norm(g, fv), threshold);
}

} // namespace fredsolve
