#pragma once

#include "fredsolve/numerics.hpp"

namespace fredsolve {

// psi = mu * int K psi + F on the grid interval.
struct SecondKindSystem {
    Kernel2D kernel;
    Fn1 free_term;
    double mu = 1.0;
    Grid1D grid;
};

struct SpectrumEstimate {
    std::vector<double> char_numbers;  // ascending in magnitude
    std::vector<GridFunction> eigenfunctions;
};

inline constexpr double kOnSpectrumRelTol = 1e-10;

GridFunction solve_direct(const SecondKindSystem& sys);
// Dense solve of (I - mu A) psi = F; A is an integral_operator matrix. Throws OnSpectrum.
Eigen::VectorXd solve_nystrom(const Eigen::MatrixXd& A, const Eigen::VectorXd& F, double mu,
                              double rel_tol = kOnSpectrumRelTol);

GridFunction neumann_iterate(const SecondKindSystem& sys, int max_iter = 1000, double tol = 1e-12);

SpectrumEstimate estimate_spectrum(const Kernel2D& kernel, const Grid1D& grid, int count);

GridFunction deflate_on_spectrum(const GridFunction& f, const GridFunction& eig);

// psi(x) = f(x) + int_a^x K(x, xi) psi(xi) dxi on grid = [a, b].
GridFunction solve_volterra2(const Kernel2D& kernel, const Fn1& f, const Grid1D& grid);

double largest_singular_value(const Eigen::MatrixXd& M, int iters = 200, double tol = 1e-12);
// Inverse power iteration on M^T M; returns 0 for a numerically singular M.
double smallest_singular_value(const Eigen::MatrixXd& M, int iters = 50, double tol = 1e-12);
double condition_number(const Eigen::MatrixXd& M);

} // namespace fredsolve
