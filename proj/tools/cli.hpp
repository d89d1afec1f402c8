#pragma once

#include "fredsolve/method.hpp"
#include "fredsolve/problems.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace fredsolve::cli {

struct RunConfig {
    std::string command;
    std::string problem = "green_m1";
    std::string method = "v2";
    std::string table;  // CSV for the tabulated kernel
    double r = 0.5;
    double lambda = 0.2;
    double mu = 0.1;
    double alpha = 1e-4;
    double step = 1.0;  // fridman
    double nu = 0.0;    // krasnoselskii; 0 picks 1 / ||A*A||
    double R = 1.0;     // quasisolution
    int iters = 200;
    int grid = kDefaultQuadOrder;
    int fourier_n = kDefaultV1Truncation;
    std::string out_dir = ".";
    std::string format;
    bool seedless = false;
};

std::vector<std::string> registered_methods();

struct SolveOutcome {
    GridFunction psi;
    ResidualReport residual;
    std::optional<double> reconstruction_error;
};

// Runs one registered method; verify_solution is always applied to the output.
SolveOutcome run_method(const FirstKindProblem& problem, const RunConfig& cfg);

// Named problem, or a key=value spec file when the path exists.
FirstKindProblem resolve_problem(const std::string& ref, const std::string& table = "");

std::string format_number(double v);

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;  // plotted on a log10 axis; non-positive values are skipped
};
std::string svg_line_chart(const std::vector<Series>& series, const std::string& x_label,
                           const std::string& y_label);

// Entry point; returns the process exit code (0 ok, 1 config error, 2 numerical-parameter error).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace fredsolve::cli
