#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace fredsolve {

using Fn1 = std::function<double(double)>;
using Fn2 = std::function<double(double, double)>;

struct Grid1D {
    std::vector<double> nodes;
    std::vector<double> weights;
    double a = 0.0;
    double b = 1.0;

    int size() const { return static_cast<int>(nodes.size()); }
    Eigen::Map<const Eigen::VectorXd> w() const { return {weights.data(), size()}; }
    Eigen::Map<const Eigen::VectorXd> x() const { return {nodes.data(), size()}; }
};

struct GridFunction {
    Grid1D grid;
    Eigen::VectorXd values;

    GridFunction() = default;
    GridFunction(Grid1D g, Eigen::VectorXd v);
    static GridFunction sample(const Grid1D& g, const Fn1& f);
};

// Where a kernel loses smoothness. Diagonal means along xi = x (derivative kink or jump).
enum class Kink { None, Diagonal };

struct Kernel2D {
    Fn2 eval;
    Kink kink = Kink::None;

    double operator()(double x, double xi) const { return eval(x, xi); }
};

struct FourierCoeffs {
    double c0 = 0.0;
    Eigen::VectorXd cn;
    Eigen::VectorXd cn_prime;

    int N() const { return static_cast<int>(cn.size()); }
};

// The nine coefficient families of a kernel against 1, cos(2n pi .), sin(2n pi .).
// Index n runs over x, m over xi; vectors and matrices are 0-based for n,m = 1..N.
struct KernelFourier {
    double p00 = 0.0;
    Eigen::VectorXd p0m, p0m_prime;  // xi test functions, x integrated against 1
    Eigen::VectorXd p0n, p0n_prime;  // x test functions, xi integrated against 1
    Eigen::MatrixXd pnm;             // cos x, cos xi
    Eigen::MatrixXd pnm_p;           // cos x, sin xi
    Eigen::MatrixXd pnm_pp;          // sin x, cos xi
    Eigen::MatrixXd pnm_ppp;         // sin x, sin xi

    int N() const { return static_cast<int>(p0m.size()); }
};

inline constexpr int kDefaultQuadOrder = 64;
inline constexpr int kDefaultFourierN = 32;

Grid1D gauss_legendre(int n, double a, double b);
Grid1D gauss_lobatto(int n, double a, double b);
// `panels` equal subintervals, each with an n-point Gauss rule.
Grid1D composite_gauss(int n, int panels, double a, double b);
// Gauss panels between consecutive sorted breakpoints (a and b are added; duplicates dropped).
Grid1D panel_gauss(int n, std::vector<double> breakpoints, double a, double b);
// Panels refined geometrically towards each center, down to width `finest`.
Grid1D graded_gauss(int n, const std::vector<double>& centers, double finest, double a, double b);

double integrate(const GridFunction& f);
double integrate(const Grid1D& g, const Fn1& f);
double l2_norm(const GridFunction& f);
double l2_norm(const Grid1D& g, const Eigen::VectorXd& v);

// Row i holds the barycentric Lagrange weights of the grid nodes at z[i].
Eigen::MatrixXd interpolation_matrix(const Grid1D& g, const std::vector<double>& z);
double interpolate(const Grid1D& g, const Eigen::VectorXd& v, double z);

// Matrix A with (A v)_i ~ int_a^b k(x_out[i], xi) v(xi) dxi for v sampled on `src`.
// Kinked kernels use split panels at xi = x and the Lagrange interpolant of v.
Eigen::MatrixXd integral_operator(const Kernel2D& k, const Grid1D& src,
                                  const std::vector<double>& x_out, int panel_order = 0);
Eigen::MatrixXd integral_operator(const Kernel2D& k, const Grid1D& src);

// int_a^b k(x, xi) g(xi) dxi for an evaluator g, splitting at the kink if any.
double apply_kernel(const Kernel2D& k, const Fn1& g, double x, double a, double b,
                    int quad_order = kDefaultQuadOrder);

FourierCoeffs fourier_coeffs(const Fn1& f, int N = kDefaultFourierN,
                             int quad_order = kDefaultQuadOrder);
KernelFourier kernel_fourier_coeffs(const Kernel2D& k, int N = kDefaultFourierN,
                                    int quad_order = kDefaultQuadOrder);

} // namespace fredsolve
