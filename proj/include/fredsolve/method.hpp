#pragma once

#include "fredsolve/kernels.hpp"
#include "fredsolve/numerics.hpp"
#include "fredsolve/problems.hpp"

#include <string>
#include <vector>

namespace fredsolve {

struct MethodParams {
    PoissonParams poisson = PoissonParams::make(0.5, 0.2);
    double mu = 0.1;
    int quad_order = kDefaultQuadOrder;
    int n_out = 101;
    double min_rel_dist = kDefaultMinRelDist;
};

struct PipelineState {
    GridFunction psi1;
    GridFunction rho;    // on [-1, 0]
    GridFunction kappa;  // on [-1, 0]
    GridFunction F0, F1;
    GridFunction psi0;
    GridFunction psi;
    double residual_l2 = 0.0;
};

struct FourierState {
    FourierCoeffs c;
    KernelFourier p;
    FourierCoeffs s;
    FourierCoeffs a;
    FourierCoeffs t;
    FourierCoeffs b;
    double sigma = 0.0;
};

enum class Solvable { Yes, No, Unknown };
std::string to_string(Solvable s);

struct ResidualReport {
    double residual_l2 = 0.0;
    double relative = 0.0;
    Solvable solvable = Solvable::Unknown;
};

inline constexpr double kDefaultSolvableThreshold = 0.05;
inline const std::vector<double> kDefaultMuCandidates = {0.05, 0.1, 0.2, -0.1, 0.5};

// Grids the pipeline lives on: quad_order Gauss points on [0,1] and on [-1,0].
Grid1D method_grid(const MethodParams& params);
Grid1D method_grid_negative(const MethodParams& params);

// Integral operator for a smooth, possibly sharply peaked periodic kernel with Poisson radius r:
// the source function is interpolated onto panels fine enough to resolve the peak.
Eigen::MatrixXd peaked_operator(const Kernel2D& k, const Grid1D& src, const std::vector<double>& x_out,
                                double r);

// K(x, xi) = k(x, xi) + lambda int_0^1 H(x, zeta) k(zeta, xi) dzeta, pointwise.
Kernel2D build_K(const Kernel2D& k, const MethodParams& params);
// The same operator acting on grid values of psi on method_grid.
Eigen::MatrixXd build_K_operator(const Kernel2D& k, const MethodParams& params);

double select_mu(const FirstKindProblem& problem, const MethodParams& params,
                 const std::vector<double>& candidates = kDefaultMuCandidates);

// F1(x) = -mu [f(x) + lambda int_0^1 H(x, xi) f(xi) dxi] on method_grid.
GridFunction build_F1(const Fn1& f, const MethodParams& params);
GridFunction solve_psi1(const FirstKindProblem& problem, const MethodParams& params);
// rho(x) = -lambda int_0^1 h(x, xi) psi1(xi) dxi on [-1, 0].
GridFunction build_rho(const GridFunction& psi1, const MethodParams& params);
// kappa(x) = rho(x) + Lambda int_{-1}^0 L(x, xi) rho(xi) dxi on [-1, 0].
GridFunction build_kappa(const GridFunction& rho, const MethodParams& params);
// F0(x) = lambda int_{-1}^0 H(x, xi) kappa(xi) dxi on [0, 1].
GridFunction build_F0(const GridFunction& kappa, const MethodParams& params);

PipelineState method_v2(const FirstKindProblem& problem, const MethodParams& params);
// psi = f' + Lambda int_0^1 L f' with f'(x) = -lambda int_0^1 l(x, xi) psi1(xi) dxi.
GridFunction method_v2_single(const GridFunction& psi1, const MethodParams& params);
GridFunction method_v2_single(const FirstKindProblem& problem, const MethodParams& params);

inline constexpr int kDefaultV1Truncation = 16;
double v1_sigma(double mu, double lambda);
// Fourier route at r = 1; only lambda and mu of params are used.
FourierState method_v1(const FirstKindProblem& problem, const MethodParams& params,
                       int N = kDefaultV1Truncation);
double fourier_eval(const FourierCoeffs& c, double x);
GridFunction fourier_sample(const FourierCoeffs& c, const Grid1D& g);

// Report for a residual norm measured against the norm of the free term.
ResidualReport classify_residual(double residual_l2, double free_term_l2,
                                 double threshold = kDefaultSolvableThreshold);
ResidualReport verify_solution(const FirstKindProblem& problem, const GridFunction& psi,
                               double threshold = kDefaultSolvableThreshold);

} // namespace fredsolve
