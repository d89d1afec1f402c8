#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fredsolve/errors.hpp"
#include "fredsolve/kernels.hpp"

#include <cmath>
#include <numbers>

using namespace fredsolve;
using std::numbers::pi;

namespace {

// Oracle quadrature on [a,b] with panels broken at every periodic image of the given peaks.
Grid1D peak_grid(double a, double b, std::initializer_list<double> peaks) {
    std::vector<double> bp;
    for (double c : peaks)
        for (int s = -3; s <= 3; ++s) {
            const double z = c + s;
            for (double d : {0.0, -0.05, 0.05, -0.15, 0.15})
                if (z + d > a && z + d < b) bp.push_back(z + d);
        }
    for (int p = 1; p < 8; ++p) bp.push_back(a + (b - a) * p / 8);
    return panel_gauss(24, bp, a, b);
}

std::vector<double> sample_points(int n) {
    std::vector<double> s(n);
    for (int i = 0; i < n; ++i) s[i] = static_cast<double>(i) / (n - 1);
    return s;
}

} // namespace

TEST_CASE("PoissonParams construction") {
    auto p = PoissonParams::make(0.5, 0.2);
    CHECK(p.Lambda == 0.2 * 0.2);
    CHECK(2 * std::pow(p.r, p.N_trunc + 1) / (1 - p.r) <= p.series_tol);
    CHECK(2 * std::pow(p.r, p.N_trunc) / (1 - p.r) > p.series_tol);
    CHECK_THROWS_AS(PoissonParams::make(1.0, 0.2), InvalidRadius);
    CHECK_THROWS_AS(PoissonParams::make(0.0, 0.2), InvalidRadius);
    CHECK_THROWS_AS(PoissonParams::make(-0.5, 0.2), InvalidRadius);
}

TEST_CASE("poisson_h closed form") {
    auto p = PoissonParams::make(0.5, 0.2);
    CHECK(std::abs(poisson_h(0.3, 0.3, p) - 3.0) < 1e-14);
    CHECK(std::abs(poisson_h(0.8, 0.3, p) - 1.0 / 3.0) < 1e-14);
    auto g = gauss_legendre(64, 0, 1);
    for (double x : {0.0, 0.2, 0.77})
        CHECK(std::abs(integrate(g, [&](double xi) { return poisson_h(x, xi, p); }) - 1.0) < 1e-10);
    // positivity and periodicity
    for (double x : sample_points(21))
        for (double xi : sample_points(21)) {
            CHECK(poisson_h(x, xi, p) > 0.0);
            CHECK(std::abs(poisson_h(x + 1.0, xi, p) - poisson_h(x, xi, p)) < 1e-13);
        }
}

TEST_CASE("poisson_h_series") {
    CHECK(poisson_h_series(0.1, 0.4, 0.5, 0) == 1.0);
    auto tiny = PoissonParams::make(1e-15, 0.2);
    CHECK(std::abs(poisson_h_series(0.1, 0.1, tiny) - 1.0) < 1e-14);
    const double r = 0.5;
    const int N = 40;
    const double bound = 2 * std::pow(r, N + 1) / (1 - r);
    auto p = PoissonParams::make(r, 0.2);
    for (double x : sample_points(101))
        CHECK(std::abs(poisson_h_series(x, 0.0, r, N) - poisson_h(x, 0.0, p)) <= bound + 1e-15);
    // long series at r close to 1 stays accurate
    auto q = PoissonParams::make(0.99, 0.2);
    for (double d : {0.0, 0.003, 0.25, 0.5})
        CHECK(std::abs(poisson_h_series(d, 0.0, q) / poisson_h(d, 0.0, q) - 1.0) < 1e-10);
}

TEST_CASE("resolvent_H trivial cases") {
    auto p = PoissonParams::make(0.5, 0.0);
    double dev = 0.0;
    for (double x : sample_points(17))
        for (double xi : sample_points(17))
            dev = std::max(dev, std::abs(resolvent_H(x, xi, p) - poisson_h_series(x, xi, p)));
    CHECK(dev == 0.0);
    auto t = PoissonParams::make(1e-15, 0.25);
    CHECK(std::abs(resolvent_H(0.2, 0.9, t) - 2.0) < 1e-12);
    auto bad = PoissonParams::make(0.5, 0.5);
    CHECK_THROWS_AS(resolvent_H(0.1, 0.2, bad), ParameterExclusion);
}

TEST_CASE("kernel_l and resolvent_L trivial cases") {
    auto p0 = PoissonParams::make(0.5, 0.0);
    for (double x : sample_points(9))
        for (double xi : sample_points(9)) {
            CHECK(std::abs(kernel_l(x, xi, p0) - poisson_h_series(x, xi, 0.25, 60)) < 1e-12);
            CHECK(std::abs(resolvent_L(x, xi, p0) - kernel_l(x, xi, p0)) < 1e-12);
        }
    auto t = PoissonParams::make(1e-15, 0.2);
    CHECK(std::abs(kernel_l(0.3, 0.1, t) - 1.0 / 0.6) < 1e-12);
    CHECK(std::abs(resolvent_L(0.3, 0.1, t) - 1.0 / 0.56) < 1e-12);
    auto bad = PoissonParams::make(0.5, -1.0 + std::sqrt(2.0));
    CHECK_THROWS_AS(resolvent_L(0.1, 0.2, bad), ParameterExclusion);
}

TEST_CASE("symmetry of the difference kernels") {
    auto p = PoissonParams::make(0.6, 0.3);
    for (double x : sample_points(11))
        for (double xi : sample_points(11)) {
            CHECK(poisson_h(x, xi, p) == poisson_h(xi, x, p));
            CHECK(std::abs(resolvent_H(x, xi, p) - resolvent_H(xi, x, p)) < 1e-13);
            CHECK(std::abs(kernel_l(x, xi, p) - kernel_l(xi, x, p)) < 1e-13);
            CHECK(std::abs(resolvent_L(x, xi, p) - resolvent_L(xi, x, p)) < 1e-13);
        }
}

TEST_CASE("eigen-actions of h") {
    auto p = PoissonParams::make(0.5, 0.2);
    for (int n = 0; n <= 4; ++n)
        for (double x : sample_points(7)) {
            auto f = [&](double xi) { return poisson_h(x, xi, p) * std::cos(2 * n * pi * xi); };
            const double full = integrate(peak_grid(-1, 1, {x}), f);
            const double unit = integrate(peak_grid(0, 1, {x}), f);
            CHECK(std::abs(full - 2 * std::pow(p.r, n) * std::cos(2 * n * pi * x)) < 1e-9);
            CHECK(std::abs(unit - std::pow(p.r, n) * std::cos(2 * n * pi * x)) < 1e-9);
        }
}

TEST_CASE("resolvent identities over the parameter lattice") {
    for (double r : {0.3, 0.5, 0.7})
        for (double lam : {-0.3, 0.2, 0.35}) {
            auto p = PoissonParams::make(r, lam);
            double eH = 0, el = 0, eL = 0;
            for (double x : sample_points(9))
                for (double xi : sample_points(9)) {
                    const double iH = integrate(peak_grid(-1, 1, {x, xi}), [&](double z) {
                        return poisson_h(x, z, p) * resolvent_H(z, xi, p);
                    });
                    eH = std::max(eH, std::abs(resolvent_H(x, xi, p) - poisson_h(x, xi, p) - lam * iH));
                    const double il = integrate(peak_grid(-1, 0, {x, xi}), [&](double z) {
                        return poisson_h(x, z, p) * resolvent_H(z, xi, p);
                    });
                    el = std::max(el, std::abs(kernel_l(x, xi, p) - il));
                    const double iL = integrate(peak_grid(0, 1, {x, xi}), [&](double z) {
                        return kernel_l(x, z, p) * resolvent_L(z, xi, p);
                    });
                    eL = std::max(eL, std::abs(resolvent_L(x, xi, p) - kernel_l(x, xi, p) - p.Lambda * iL));
                }
            INFO("r=" << r << " lambda=" << lam);
            CHECK(eH < 1e-8);
            CHECK(el < 1e-8);
            CHECK(eL < 1e-8);
        }
}

TEST_CASE("validate_lambda") {
    for (double r : {0.3, 0.5, 0.9}) {
        auto rep = validate_lambda(PoissonParams::make(r, 0.5));
        CHECK_FALSE(rep.ok);
        CHECK(rep.family == "r^-n/2");
        CHECK(rep.n == 0);
    }
    auto rep = validate_lambda(PoissonParams::make(0.5, -1.0 + std::sqrt(2.0)));
    CHECK_FALSE(rep.ok);
    CHECK(rep.family == "(-1+sqrt2)r^-n");

    // 0.2 at r = 0.5: oracle enumerates the whole exclusion set and measures the clearance
    auto p = PoissonParams::make(0.5, 0.2);
    double clearance = 1e300;
    clearance = std::min(clearance, std::abs(0.2));
    for (int n = 0; n <= p.N_trunc; ++n)
        for (double s : {1.0, 0.5, -1 + std::sqrt(2.0), -1 - std::sqrt(2.0)}) {
            const double v = s * std::pow(0.5, -n);
            clearance = std::min(clearance, std::abs(0.2 - v) / std::abs(v));
        }
    CHECK(clearance >= 0.05);
    CHECK(validate_lambda(p, 0.05).ok);

    CHECK_FALSE(validate_lambda(PoissonParams::make(0.5, 0.0)).ok);
    CHECK(validate_lambda(PoissonParams::make(0.5, 0.0)).family == "0");
    auto far = validate_lambda(PoissonParams::make(0.5, 2.0));  // r^-1
    CHECK_FALSE(far.ok);
    CHECK(far.family == "r^-n");
    CHECK(far.n == 1);
    CHECK_THROWS_AS(require_valid_lambda(PoissonParams::make(0.5, 0.5)), ParameterExclusion);
}
