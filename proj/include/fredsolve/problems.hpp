#pragma once

#include "fredsolve/numerics.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fredsolve {

struct FirstKindProblem {
    Kernel2D kernel;
    Fn1 free_term;
    std::string name;
    std::string provenance;
    std::optional<Fn1> psi_star;  // metadata only; solvers never read it
};

struct NoiseSpec {
    double epsilon = 0.0;
    double omega = 0.0;
};

// Options that some registered kernels need.
struct KernelOptions {
    double r = 0.5;          // poisson_r
    std::string table_path;  // tabulated
};

struct TabulatedKernel {
    std::vector<double> x_nodes;
    std::vector<double> xi_nodes;
    Eigen::MatrixXd values;  // values(i, j) = k(x_nodes[i], xi_nodes[j])
    std::string source;

    double operator()(double x, double xi) const;  // bilinear, clamped to the table
};

TabulatedKernel parse_tabulated_csv(const std::string& text, const std::string& source = "");
TabulatedKernel load_tabulated_csv(const std::string& path);

double green_triangular(double x, double xi);

std::vector<std::string> registered_kernels();
Kernel2D make_kernel(const std::string& name, const KernelOptions& opt = {});

GridFunction forward_apply(const Kernel2D& k, const Fn1& psi, const Grid1D& out,
                           int quad_order = kDefaultQuadOrder);
// psi is interpolated from its own grid.
GridFunction forward_apply(const Kernel2D& k, const GridFunction& psi, const Grid1D& out);

FirstKindProblem make_manufactured(const Kernel2D& k, const std::string& name, Fn1 psi,
                                   int quad_order = kDefaultQuadOrder);
FirstKindProblem make_manufactured(const std::string& kernel_name, const std::string& psi_expr,
                                   const KernelOptions& opt = {});

FirstKindProblem perturb(const FirstKindProblem& problem, const NoiseSpec& spec);

struct NamedProblem {
    std::string name;
    std::string kernel;
    std::string description;
    std::string provenance;
};

std::vector<NamedProblem> named_problems();
FirstKindProblem make_named_problem(const std::string& name, const KernelOptions& opt = {});

// Line-oriented key=value text: name, kernel, r, table, psi_expr | f_expr, noise.epsilon, noise.omega.
// Blank lines and lines starting with '#' are ignored.
std::map<std::string, std::string> parse_key_values(const std::string& text);
FirstKindProblem problem_from_spec(const std::map<std::string, std::string>& kv);

} // namespace fredsolve
