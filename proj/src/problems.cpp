#include "fredsolve/problems.hpp"
#include "fredsolve/errors.hpp"
#include "fredsolve/expr.hpp"
#include "fredsolve/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace fredsolve {

namespace {

constexpr double kPi = std::numbers::pi;

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
    return out;
}

double to_double(const std::string& s, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw InvalidArgument("cannot read " + what + " from '" + s + "'");
    }
}

// Index i with nodes[i] <= z <= nodes[i+1] and the fractional position, clamped.
std::pair<int, double> locate(const std::vector<double>& nodes, double z) {
    const int n = static_cast<int>(nodes.size());
    if (n == 1 || z <= nodes.front()) return {0, 0.0};
    if (z >= nodes.back()) return {n - 2, 1.0};
    const auto it = std::upper_bound(nodes.begin(), nodes.end(), z);
    const int i = static_cast<int>(it - nodes.begin()) - 1;
    return {i, (z - nodes[i]) / (nodes[i + 1] - nodes[i])};
}

Fn1 expr_fn(const std::string& text) {
    const Expr e = Expr::parse(text);
    return [e](double x) { return e(x); };
}

} // namespace

double TabulatedKernel::operator()(double x, double xi) const {
    const auto [i, tx] = locate(x_nodes, x);
    const auto [j, ty] = locate(xi_nodes, xi);
    const int i1 = std::min(i + 1, static_cast<int>(x_nodes.size()) - 1);
    const int j1 = std::min(j + 1, static_cast<int>(xi_nodes.size()) - 1);
    return (1 - tx) * (1 - ty) * values(i, j) + tx * (1 - ty) * values(i1, j) +
           (1 - tx) * ty * values(i, j1) + tx * ty * values(i1, j1);
}

TabulatedKernel parse_tabulated_csv(const std::string& text, const std::string& source) {
    std::stringstream ss(text);
    std::string line;
    std::vector<std::vector<std::string>> rows;
    while (std::getline(ss, line)) {
        if (trim(line).empty()) continue;
        rows.push_back(split_csv_line(line));
    }
    if (rows.size() < 2) throw InvalidArgument("tabulated kernel needs a header row and at least one data row");
    TabulatedKernel t;
    t.source = source;
    for (std::size_t j = 1; j < rows[0].size(); ++j) t.xi_nodes.push_back(to_double(rows[0][j], "xi node"));
    if (t.xi_nodes.empty()) throw InvalidArgument("tabulated kernel header has no xi nodes");
    t.values.resize(static_cast<Eigen::Index>(rows.size() - 1), static_cast<Eigen::Index>(t.xi_nodes.size()));
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].size() != t.xi_nodes.size() + 1)
            throw InvalidArgument("tabulated kernel row " + std::to_string(i) + " has the wrong number of cells");
        t.x_nodes.push_back(to_double(rows[i][0], "x node"));
        for (std::size_t j = 1; j < rows[i].size(); ++j)
            t.values(static_cast<Eigen::Index>(i - 1), static_cast<Eigen::Index>(j - 1)) =
                to_double(rows[i][j], "kernel value");
    }
    auto increasing = [](const std::vector<double>& v) {
        return std::adjacent_find(v.begin(), v.end(), std::greater_equal<>()) == v.end();
    };
    if (!increasing(t.x_nodes) || !increasing(t.xi_nodes))
        throw InvalidArgument("tabulated kernel nodes must be strictly increasing");
    return t;
}

TabulatedKernel load_tabulated_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open tabulated kernel file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_tabulated_csv(ss.str(), path);
}

double green_triangular(double x, double xi) {
    return x <= xi ? x * (1.0 - xi) : xi * (1.0 - x);
}

std::vector<std::string> registered_kernels() {
    return {"green_triangular", "constant", "poisson_r", "tabulated"};
}

Kernel2D make_kernel(const std::string& name, const KernelOptions& opt) {
    if (name == "green_triangular") return {green_triangular, Kink::Diagonal};
    if (name == "constant") return {[](double, double) { return 1.0; }, Kink::None};
    if (name == "poisson_r") {
        const PoissonParams p = PoissonParams::make(opt.r, 0.0);
        return {[p](double x, double xi) { return poisson_h(x, xi, p); }, Kink::None};
    }
    if (name == "tabulated") {
        if (opt.table_path.empty()) throw InvalidArgument("tabulated kernel needs a table path");
        auto t = std::make_shared<TabulatedKernel>(load_tabulated_csv(opt.table_path));
        return {[t](double x, double xi) { return (*t)(x, xi); }, Kink::None};
    }
    throw InvalidArgument("unknown kernel '" + name + "'");
}

GridFunction forward_apply(const Kernel2D& k, const Fn1& psi, const Grid1D& out, int quad_order) {
    Eigen::VectorXd v(out.size());
    for (int i = 0; i < out.size(); ++i) v[i] = apply_kernel(k, psi, out.nodes[i], 0.0, 1.0, quad_order);
    return {out, v};
}

GridFunction forward_apply(const Kernel2D& k, const GridFunction& psi, const Grid1D& out) {
    return {out, integral_operator(k, psi.grid, out.nodes) * psi.values};
}

FirstKindProblem make_manufactured(const Kernel2D& k, const std::string& name, Fn1 psi, int quad_order) {
    FirstKindProblem p;
    p.kernel = k;
    p.name = name;
    p.provenance = "manufactured: f = forward map of psi*";
    p.free_term = [k, psi, quad_order](double x) { return apply_kernel(k, psi, x, 0.0, 1.0, quad_order); };
    p.psi_star = std::move(psi);
    return p;
}

FirstKindProblem make_manufactured(const std::string& kernel_name, const std::string& psi_expr,
                                   const KernelOptions& opt) {
    return make_manufactured(make_kernel(kernel_name, opt), kernel_name + ":" + psi_expr, expr_fn(psi_expr));
}

FirstKindProblem perturb(const FirstKindProblem& problem, const NoiseSpec& spec) {
    if (spec.epsilon < 0.0) throw InvalidArgument("noise amplitude must be nonnegative");
    if (spec.epsilon == 0.0) return problem;
    FirstKindProblem p = problem;
    const Fn1 f = problem.free_term;
    const double eps = spec.epsilon, om = spec.omega;
    p.free_term = [f, eps, om](double x) { return f(x) + eps * std::sin(om * x); };
    p.psi_star.reset();
    return p;
}

std::vector<NamedProblem> named_problems() {
    return {
        {"green_m1", "green_triangular", "psi* = sin(pi x), f = sin(pi x)/pi^2", "analytic eigenpair of the string kernel"},
        {"green_m5", "green_triangular", "psi* = sin(5 pi x), f = sin(5 pi x)/(25 pi^2)", "analytic eigenpair of the string kernel"},
        {"green_quadratic", "green_triangular", "psi* = x(1-x), f by forward map", "manufactured"},
        {"green_f_one", "green_triangular", "f = 1, not in the range of the operator", "solvability counterexample"},
        {"constant_one", "constant", "psi* = 1, f = 1", "manufactured"},
        {"zero_rhs", "green_triangular", "f = 0, psi* = 0", "trivial"},
    };
}

FirstKindProblem make_named_problem(const std::string& name, const KernelOptions& opt) {
    auto eigen_problem = [](int m) {
        FirstKindProblem p;
        p.kernel = {green_triangular, Kink::Diagonal};
        p.name = "green_m" + std::to_string(m);
        p.provenance = "analytic eigenpair of the string kernel";
        const double lam = (m * kPi) * (m * kPi);
        p.free_term = [m, lam](double x) { return std::sin(m * kPi * x) / lam; };
        p.psi_star = [m](double x) { return std::sin(m * kPi * x); };
        return p;
    };
    if (name == "green_m1") return eigen_problem(1);
    if (name == "green_m5") return eigen_problem(5);
    if (name == "green_quadratic") {
        auto p = make_manufactured(make_kernel("green_triangular"), name, [](double x) { return x * (1 - x); });
        return p;
    }
    if (name == "green_f_one") {
        FirstKindProblem p;
        p.kernel = {green_triangular, Kink::Diagonal};
        p.free_term = [](double) { return 1.0; };
        p.name = name;
        p.provenance = "solvability counterexample";
        return p;
    }
    if (name == "constant_one") {
        FirstKindProblem p;
        p.kernel = make_kernel("constant", opt);
        p.free_term = [](double) { return 1.0; };
        p.psi_star = [](double) { return 1.0; };
        p.name = name;
        p.provenance = "manufactured";
        return p;
    }
    if (name == "zero_rhs") {
        FirstKindProblem p;
        p.kernel = {green_triangular, Kink::Diagonal};
        p.free_term = [](double) { return 0.0; };
        p.psi_star = [](double) { return 0.0; };
        p.name = name;
        p.provenance = "trivial";
        return p;
    }
    throw InvalidArgument("unknown problem '" + name + "'");
}

std::map<std::string, std::string> parse_key_values(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw InvalidArgument("line " + std::to_string(lineno) + ": expected key=value");
        kv[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
    }
    return kv;
}

FirstKindProblem problem_from_spec(const std::map<std::string, std::string>& kv) {
    auto get = [&](const std::string& k) -> std::optional<std::string> {
        const auto it = kv.find(k);
        if (it == kv.end()) return std::nullopt;
        return it->second;
    };
    static const char* known[] = {"name", "kernel", "r", "table", "psi_expr", "f_expr", "noise.epsilon", "noise.omega"};
    for (const auto& [k, v] : kv)
        if (std::find(std::begin(known), std::end(known), k) == std::end(known))
            throw InvalidArgument("unknown key '" + k + "' in problem spec");

    KernelOptions opt;
    if (auto r = get("r")) opt.r = to_double(*r, "r");
    if (auto t = get("table")) opt.table_path = *t;
    const std::string kernel = get("kernel").value_or("green_triangular");

    FirstKindProblem p;
    const auto psi = get("psi_expr");
    const auto f = get("f_expr");
    if (psi && f) throw InvalidArgument("problem spec may give psi_expr or f_expr, not both");
    if (psi) {
        p = make_manufactured(kernel, *psi, opt);
    } else if (f) {
        p.kernel = make_kernel(kernel, opt);
        p.free_term = expr_fn(*f);
        p.name = kernel + ":f=" + *f;
        p.provenance = "user free term";
    } else {
        throw InvalidArgument("problem spec needs psi_expr or f_expr");
    }
    if (auto n = get("name")) p.name = *n;
    NoiseSpec noise;
    if (auto e = get("noise.epsilon")) noise.epsilon = to_double(*e, "noise.epsilon");
    if (auto w = get("noise.omega")) noise.omega = to_double(*w, "noise.omega");
    return perturb(p, noise);
}

} // namespace fredsolve
