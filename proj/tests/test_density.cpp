#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "loclen/error.hpp"
#include "loclen/limiting_density.hpp"
#include "loclen/monte_carlo.hpp"
#include "loclen/oracles.hpp"

#include <cmath>

using namespace loclen;
using namespace loclen::density;

TEST_CASE("lambda agrees with an independent nested-quadrature evaluation") {
    const double kLambdaRef = oracles::lambda_reference();
    const DensityPoint l = lambda_const();
    CHECK(std::abs(l.value - kLambdaRef) < 1e-7);
    CHECK(l.est_error < 1e-6);
    CHECK(lambda_const({}, true).value == doctest::Approx(l.value).epsilon(1e-8));
}

TEST_CASE("g_infinity is even, positive and decreasing") {
    double prev = INFINITY;
    for (double x : {0.5, 1.0, 2.0, 4.0}) {
        const DensityPoint p = g_infinity(x);
        CHECK(p.value > 0.0);
        CHECK(p.value < prev);
        CHECK(p.method == Method::Analytic);
        CHECK(g_infinity(-x).value == p.value);
        prev = p.value;
    }
}

TEST_CASE("g_infinity does not depend on the theta algorithm") {
    CubatureConfig panels;
    panels.theta_method = kernels::ThetaMethod::OscillatoryPanels;
    for (double x : {4.0, 8.0}) {
        CAPTURE(x);
        CHECK(g_infinity(x, panels).value == doctest::Approx(g_infinity(x).value).epsilon(1e-6));
    }
}

TEST_CASE("a fixed zeta range reproduces the adaptive node sets") {
    CubatureConfig fixed;
    fixed.z_log_range = std::make_pair(-15.0, 15.0);
    CHECK(g_infinity(2.0, fixed).value == doctest::Approx(g_infinity(2.0).value).epsilon(1e-6));
}

TEST_CASE("tail ratio is x^{3/2} g_infinity") {
    const double x = 9.0;
    CHECK(tail_ratio(x).value == doctest::Approx(27.0 * g_infinity(x).value).epsilon(1e-14));
}

TEST_CASE("two-point function is symmetric under x -> L - x") {
    for (double x : {0.5, 1.5}) CHECK(two_point_L(6.0, x).value == doctest::Approx(two_point_L(6.0, 6.0 - x).value).epsilon(1e-10));
}

TEST_CASE("two-point function agrees with periodic bridge Monte Carlo") {
    const double L = 8.0, x = 2.0;
    const DensityPoint a = two_point_L(L, x);
    const mc::CurveEstimate m = mc::mc_rho_L_covariance(L, {x}, 20000, 0.01, Seed{60, 0});
    const double se = std::hypot(L * a.est_error, m.std_errors[0]);
    MESSAGE("analytic " << L * a.value << ", MC " << m.values[0] << " +- " << m.std_errors[0]);
    CHECK(std::abs(L * a.value - m.values[0]) < 3.0 * se);
}

TEST_CASE("small separations fall back to Monte Carlo") {
    CubatureConfig cfg;
    cfg.min_t = 0.01;
    cfg.fallback_samples = 200;
    cfg.fallback_M = 16.0;
    cfg.fallback_delta = 0.01;
    const DensityPoint p = g_infinity(0.02, cfg);
    CHECK(p.method == Method::MonteCarloFallback);
    CHECK(p.value > 0.0);
    CHECK(p.est_error > 0.0);
}

TEST_CASE("argument validation") {
    CHECK_THROWS_AS(g_infinity(0.0), InvalidArgument);
    CHECK_THROWS_AS(two_point_L(8.0, 0.0), InvalidArgument);
    CHECK_THROWS_AS(two_point_L(8.0, 8.0), InvalidArgument);
    CHECK_THROWS_AS(two_point_L(8.0, 1e-7), DomainRestriction);
    CHECK_THROWS_AS(tail_ratio(-1.0), InvalidArgument);
    CubatureConfig bad;
    bad.outer_rel_tol = 0.0;
    CHECK_THROWS_AS(lambda_const(bad), InvalidArgument);
    bad = CubatureConfig{};
    bad.z_log_range = std::make_pair(1.0, -1.0);
    CHECK_THROWS_AS(g_infinity(1.0, bad), InvalidArgument);
}
