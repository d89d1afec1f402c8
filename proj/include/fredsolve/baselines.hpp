#pragma once

#include "fredsolve/numerics.hpp"
#include "fredsolve/problems.hpp"

#include <optional>
#include <vector>

namespace fredsolve {

struct BaselineParams {
    double alpha = 1e-4;
    double lambda_step = 1.0;
    double nu = 1.0;
    double R = 1.0;
    double delta = 0.0;
    double gamma = 0.0;
    double c1 = 1.0;
    double c2 = 1.0;
    int max_iter = 200;
    int quad_order = kDefaultQuadOrder;
};

// Nystrom form of A psi = f on an n-point Gauss grid over [0,1].
struct Discretization {
    Grid1D grid;
    Eigen::MatrixXd A;
    Eigen::VectorXd f;
};

Discretization discretize(const FirstKindProblem& problem, int n = kDefaultQuadOrder);

// Adjoint of A in the grid-weighted L2 inner product: W^-1 A^T W.
Eigen::MatrixXd weighted_adjoint(const Eigen::MatrixXd& A, const Grid1D& g);
// Operator norm of M in the grid-weighted L2 space by power iteration.
double weighted_operator_norm(const Eigen::MatrixXd& M, const Grid1D& g, int iters = 50, double tol = 1e-8);

struct StopRule {
    double delta = 0.0;
    double gamma = 0.0;
    double c1 = 1.0;
    double c2 = 1.0;
};

struct IterationHistory {
    Grid1D grid;
    std::vector<Eigen::VectorXd> iterates;  // psi_0, psi_1, ...
    std::vector<double> residuals;          // ||A psi_n - f|| for each iterate
    std::optional<int> stop_index;
    bool converged = false;                 // steepest descent: zero gradient reached

    GridFunction last() const { return {grid, iterates.back()}; }
};

GridFunction lavrentiev(const FirstKindProblem& problem, double alpha, int n = kDefaultQuadOrder);
GridFunction tikhonov_weighted(const FirstKindProblem& problem, double alpha, const Fn1& p0,
                               int n = kDefaultQuadOrder);

// psi0 == nullopt starts from zero. With a stop rule, iteration ends at its stop index.
IterationHistory fridman_iterate(const FirstKindProblem& problem, double lambda_step,
                                 const std::optional<Fn1>& psi0, int max_iter,
                                 const std::optional<StopRule>& stop = std::nullopt, int n = kDefaultQuadOrder);
IterationHistory krasnoselskii_iterate(const FirstKindProblem& problem, double nu,
                                       const std::optional<Fn1>& psi0, int max_iter,
                                       const std::optional<StopRule>& stop = std::nullopt,
                                       int n = kDefaultQuadOrder);
GridFunction averaged_iterate(const FirstKindProblem& problem, const std::optional<Fn1>& phi0, int m,
                              int n = kDefaultQuadOrder);
IterationHistory implicit_iterate(const FirstKindProblem& problem, double alpha, const std::optional<Fn1>& psi0,
                                  int max_iter, const std::optional<StopRule>& stop = std::nullopt,
                                  int n = kDefaultQuadOrder);
IterationHistory steepest_descent(const FirstKindProblem& problem, const std::optional<Fn1>& psi0, int max_iter,
                                  const std::optional<StopRule>& stop = std::nullopt, int n = kDefaultQuadOrder);

GridFunction quasisolution(const FirstKindProblem& problem, double R, int n = kDefaultQuadOrder);

// First n with ||psi_{n+1} - psi_n|| <= c1 delta + c2 gamma.
std::optional<int> stopping_rule(const IterationHistory& history, double delta, double gamma, double c1 = 1.0,
                                 double c2 = 1.0);

// Smallest characteristic number of a symmetric kernel on the grid.
double smallest_char_number(const Kernel2D& k, const Grid1D& g);

} // namespace fredsolve
