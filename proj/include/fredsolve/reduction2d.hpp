#pragma once

#include "fredsolve/method.hpp"
#include "fredsolve/numerics.hpp"

#include <functional>
#include <string>

namespace fredsolve {

using Fn3 = std::function<double(double, double, double)>;

// int tau1(x,y,xi) psi(xi,y) dxi + int tau2(x,y,eta) psi(x,eta) deta = f(x,y) on the unit square.
struct Bvp2DReduction {
    Fn3 tau1;  // (x, y, xi), kinked at xi = x
    Fn3 tau2;  // (x, y, eta), kinked at eta = y
    Fn2 free_term;
    std::string name;
};

// values(i, j) = u(x_grid[i], y_grid[j]).
struct GridFunction2D {
    Grid1D x_grid;
    Grid1D y_grid;
    Eigen::MatrixXd values;

    GridFunction2D() = default;
    GridFunction2D(Grid1D xg, Grid1D yg, Eigen::MatrixXd v);
    static GridFunction2D sample(const Grid1D& xg, const Grid1D& yg, const Fn2& f);
};

double l2_norm(const GridFunction2D& u);

// u'' - a u = f on [0,1], u'(0) = 0, u(1) = 0, with psi = u''.
struct OdeReduction {
    GridFunction psi;  // Gauss grid
    GridFunction u;    // Lobatto grid of the same size, endpoints included
    double c0 = 0.0;
};

OdeReduction reduce_ode_volterra(const Fn1& a, const Fn1& f, int n = kDefaultQuadOrder);
OdeReduction reduce_ode_fredholm(const Fn1& a, const Fn1& f, int n = kDefaultQuadOrder);

// Delta u = -1 in the unit square, u = 0 on the boundary, psi = u_xx.
Bvp2DReduction reduce_membrane();
// u_t = u_xx, u(x,0) = u0(x), u(0,t) = u(1,t) = 0, psi = u_xx; y plays the role of t.
Bvp2DReduction reduce_heat(const Fn1& u0);

enum class Route { X, Y, XCorrected, YCorrected };

// Reconstructed u on Lobatto grids of the sizes of psi's grids, so boundary values are present.
GridFunction2D reconstruct_u(const Bvp2DReduction& red, const GridFunction2D& psi, Route which);

// 2 ||U1 - U2|| / ||U1 + U2||.
double closure_delta(const GridFunction2D& U1, const GridFunction2D& U2);

inline constexpr int kDefault2DGrid = 24;
inline constexpr int kMax2DUnknowns = 4096;

struct Method2DParams {
    MethodParams base;
    int nx = kDefault2DGrid;
    int ny = kDefault2DGrid;
};

struct Method2DResult {
    GridFunction2D psi1, psi0, psi;
    ResidualReport residual;
};

// Matrix of the left-hand side acting on column-major vec(psi) over the tensor grid.
Eigen::MatrixXd assemble2d(const Bvp2DReduction& red, const Grid1D& xg, const Grid1D& yg);

// The kernel of the 2D second-kind equation: (I + lambda H (x) I) applied to assemble2d.
Eigen::MatrixXd assemble2d_K(const Bvp2DReduction& red, const Grid1D& xg, const Grid1D& yg,
                             const MethodParams& params);

Method2DResult method2d_solve(const Bvp2DReduction& red, const Method2DParams& params);

ResidualReport verify2d(const Bvp2DReduction& red, const GridFunction2D& psi,
                        double threshold = kDefaultSolvableThreshold);
// Residual of an evaluator psi on the tensor grid, integrals by split Gauss quadrature.
ResidualReport verify2d(const Bvp2DReduction& red, const Fn2& psi, const Grid1D& xg, const Grid1D& yg,
                        double threshold = kDefaultSolvableThreshold, int quad_order = kDefaultQuadOrder);

} // namespace fredsolve
