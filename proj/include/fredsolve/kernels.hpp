#pragma once

#include "fredsolve/numerics.hpp"

#include <string>

namespace fredsolve {

struct PoissonParams {
    double r = 0.5;
    double lambda = 0.2;
    double Lambda = 0.04;
    int N_trunc = 0;
    double series_tol = 1e-14;

    // Throws InvalidRadius unless 0 < r < 1.
    static PoissonParams make(double r, double lambda, double series_tol = 1e-14);
};

// Smallest N with 2 r^(N+1) / (1 - r) <= tol.
int truncation_for(double r, double tol);

double poisson_h(double x, double xi, const PoissonParams& p);
double poisson_h_series(double x, double xi, const PoissonParams& p);
double poisson_h_series(double x, double xi, double r, int N);
double resolvent_H(double x, double xi, const PoissonParams& p);
double kernel_l(double x, double xi, const PoissonParams& p);
double resolvent_L(double x, double xi, const PoissonParams& p);

Kernel2D poisson_kernel(const PoissonParams& p);
Kernel2D resolvent_H_kernel(const PoissonParams& p);
Kernel2D kernel_l_kernel(const PoissonParams& p);
Kernel2D resolvent_L_kernel(const PoissonParams& p);

struct LambdaReport {
    bool ok = true;
    std::string family;  // "0", "r^-n", "r^-n/2", "(-1+sqrt2)r^-n", "(-1-sqrt2)r^-n"
    int n = 0;
    double excluded_value = 0.0;
    double rel_dist = 0.0;

    std::string describe() const;
};

inline constexpr double kDefaultMinRelDist = 1e-3;

LambdaReport validate_lambda(const PoissonParams& p, double min_rel_dist = kDefaultMinRelDist);
// Throws ParameterExclusion built from the report when lambda is excluded.
void require_valid_lambda(const PoissonParams& p, double min_rel_dist = kDefaultMinRelDist);

} // namespace fredsolve
