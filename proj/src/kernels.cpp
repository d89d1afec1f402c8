#include "fredsolve/kernels.hpp"
#include "fredsolve/errors.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

namespace fredsolve {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSqrt2 = std::numbers::sqrt2;
// Evaluators refuse only genuinely singular denominators; the policy margin lives in validate_lambda.
constexpr double kSingular = 1e-12;

[[noreturn]] void throw_singular(const char* family, int n, double lambda) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "lambda = %.17g hits the excluded family %s at n = %d", lambda,
                  family, n);
    throw ParameterExclusion(family, n, lambda, buf);
}

// c0 + 2 sum_{n=1}^{N} coef(n, r^n) cos(2 n pi d), with cos(n theta) by a reseeded recurrence.
template <class Coef>
double cos_series(double d, double r, int N, double c0, Coef coef) {
    const double theta = 2.0 * kPi * d;
    const double two_cos = 2.0 * std::cos(theta);
    double sum = 0.0;
    double rn = 1.0;
    double cprev = 1.0, ccur = 1.0;
    for (int n = 1; n <= N; ++n) {
        rn *= r;
        if (rn == 0.0) break;
        if ((n - 1) % 256 == 0) {
            ccur = std::cos(n * theta);
            cprev = std::cos((n - 1) * theta);
        } else {
            const double next = two_cos * ccur - cprev;
            cprev = ccur;
            ccur = next;
        }
        sum += coef(n, rn) * ccur;
    }
    return c0 + 2.0 * sum;
}

double half_denominator(double lambda, double rn, int n) {
    const double d = 1.0 - 2.0 * lambda * rn;
    if (std::abs(d) < kSingular) throw_singular("r^-n/2", n, lambda);
    return d;
}

double quad_denominator(double lambda, double rn, int n) {
    const double u = lambda * rn;
    const double d = 1.0 - 2.0 * u - u * u;
    if (std::abs(d) < kSingular) throw_singular(u > 0 ? "(-1+sqrt2)r^-n" : "(-1-sqrt2)r^-n", n, lambda);
    return d;
}

} // namespace

int truncation_for(double r, double tol) {
    if (!(r > 0.0 && r < 1.0)) throw InvalidRadius("Poisson radius r must lie in (0,1)");
    if (!(tol > 0.0)) throw InvalidArgument("series tolerance must be positive");
    int N = 0;
    double tail = 2.0 * r / (1.0 - r);
    while (tail > tol) {
        tail *= r;
        ++N;
    }
    return N;
}

PoissonParams PoissonParams::make(double r, double lambda, double series_tol) {
    PoissonParams p;
    p.r = r;
    p.lambda = lambda;
    p.Lambda = lambda * lambda;
    p.series_tol = series_tol;
    p.N_trunc = truncation_for(r, series_tol);
    return p;
}

double poisson_h(double x, double xi, const PoissonParams& p) {
    const double r = p.r;
    return (1.0 - r * r) / (1.0 - 2.0 * r * std::cos(2.0 * kPi * (x - xi)) + r * r);
}

double poisson_h_series(double x, double xi, double r, int N) {
    return cos_series(x - xi, r, N, 1.0, [](int, double rn) { return rn; });
}

double poisson_h_series(double x, double xi, const PoissonParams& p) {
    return poisson_h_series(x, xi, p.r, p.N_trunc);
}

double resolvent_H(double x, double xi, const PoissonParams& p) {
    const double lam = p.lambda;
    const double c0 = 1.0 / half_denominator(lam, 1.0, 0);
    return cos_series(x - xi, p.r, p.N_trunc, c0,
                      [lam](int n, double rn) { return rn / half_denominator(lam, rn, n); });
}

double kernel_l(double x, double xi, const PoissonParams& p) {
    const double lam = p.lambda;
    const double c0 = 1.0 / half_denominator(lam, 1.0, 0);
    return cos_series(x - xi, p.r, p.N_trunc, c0,
                      [lam](int n, double rn) { return rn * rn / half_denominator(lam, rn, n); });
}

double resolvent_L(double x, double xi, const PoissonParams& p) {
    const double lam = p.lambda;
    half_denominator(lam, 1.0, 0);
    const double c0 = 1.0 / quad_denominator(lam, 1.0, 0);
    return cos_series(x - xi, p.r, p.N_trunc, c0, [lam](int n, double rn) {
        half_denominator(lam, rn, n);
        return rn * rn / quad_denominator(lam, rn, n);
    });
}

Kernel2D poisson_kernel(const PoissonParams& p) {
    return {[p](double x, double xi) { return poisson_h(x, xi, p); }, Kink::None};
}

Kernel2D resolvent_H_kernel(const PoissonParams& p) {
    return {[p](double x, double xi) { return resolvent_H(x, xi, p); }, Kink::None};
}

Kernel2D kernel_l_kernel(const PoissonParams& p) {
    return {[p](double x, double xi) { return kernel_l(x, xi, p); }, Kink::None};
}

Kernel2D resolvent_L_kernel(const PoissonParams& p) {
    return {[p](double x, double xi) { return resolvent_L(x, xi, p); }, Kink::None};
}

std::string LambdaReport::describe() const {
    if (ok) return "lambda admissible";
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "lambda excluded: family %s, n = %d, excluded value %.17g, relative distance %.3g",
                  family.c_str(), n, excluded_value, rel_dist);
    return buf;
}

LambdaReport validate_lambda(const PoissonParams& p, double min_rel_dist) {
    LambdaReport rep;
    const double lam = p.lambda;
    auto fail = [&](const char* fam, int n, double v, double dist) {
        rep.ok = false;
        rep.family = fam;
        rep.n = n;
        rep.excluded_value = v;
        rep.rel_dist = dist;
    };
    // Relative distance to zero is undefined; use the absolute distance.
    if (std::abs(lam) < min_rel_dist) {
        fail("0", 0, 0.0, std::abs(lam));
        return rep;
    }
    const struct {
        const char* name;
        double scale;
    } families[] = {{"r^-n", 1.0},
                    {"r^-n/2", 0.5},
                    {"(-1+sqrt2)r^-n", -1.0 + kSqrt2},
                    {"(-1-sqrt2)r^-n", -1.0 - kSqrt2}};
    double rinv_n = 1.0;
    for (int n = 0; n <= p.N_trunc; ++n) {
        for (const auto& f : families) {
            const double v = f.scale * rinv_n;
            const double dist = std::abs(lam - v) / std::abs(v);
            if (dist < min_rel_dist) {
                fail(f.name, n, v, dist);
                return rep;
            }
        }
        rinv_n /= p.r;
        // Excluded values beyond |lambda| * (1 + margin) by a wide factor cannot be close.
        if (0.4 * rinv_n > 2.0 * std::abs(lam) + 1.0) break;
    }
    return rep;
}

void require_valid_lambda(const PoissonParams& p, double min_rel_dist) {
    const LambdaReport rep = validate_lambda(p, min_rel_dist);
    if (!rep.ok) throw ParameterExclusion(rep.family, rep.n, rep.excluded_value, rep.describe());
}

} // namespace fredsolve
