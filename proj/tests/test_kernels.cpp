#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "loclen/error.hpp"
#include "loclen/oracles.hpp"
#include "loclen/quadrature.hpp"
#include "loclen/yor_kernels.hpp"

#include <cmath>
#include <vector>

using namespace loclen;
using namespace loclen::kernels;

namespace {

double h_closed_form(double y, double x) {
    const double r = std::exp(x) / y;
    return std::exp(x - (1.0 + std::exp(2.0 * x)) / (2.0 * y)) * std::cyl_bessel_k(0.0, r) / (r * y * y);
}

double a_mass(double t, double x) {
    auto f = [&](double s) { return std::exp(s + log_yor_density_a(t, s, x).log_value); };
    double m = 0.0;
    for (double a = -12.0; a < 12.0; a += 0.25) m += quad::integrate(f, a, a + 0.25, 1e-16, 1e-11).value;
    return m;
}

}  // namespace

TEST_CASE("theta matches high-precision references") {
    for (const auto& ref : oracles::theta_references()) {
        CAPTURE(ref.r);
        CAPTURE(ref.t);
        const KernelValue v = theta(ref.r, ref.t);
        CHECK(v.value == doctest::Approx(ref.value).epsilon(1e-9));
        CHECK_FALSE(v.precision_loss);
    }
}

TEST_CASE("oscillatory panels agree with steepest descent for moderate t") {
    QuadratureConfig panels;
    panels.theta_method = ThetaMethod::OscillatoryPanels;
    for (const auto& ref : oracles::theta_references()) {
        if (ref.t < 0.5 || ref.value < 1e-30) continue;
        CAPTURE(ref.r);
        CAPTURE(ref.t);
        CHECK(theta(ref.r, ref.t, panels).value == doctest::Approx(ref.value).epsilon(1e-7));
    }
}

TEST_CASE("log_theta is consistent with theta") {
    for (double r : {0.1, 1.0, 7.0})
        for (double t : {0.1, 1.0, 30.0})
            CHECK(std::exp(log_theta(std::log(r), t).log_value) == doctest::Approx(theta(r, t).value).epsilon(1e-13));
}

TEST_CASE("Laplace transform of theta is I_nu") {
    for (double r : {0.5, 1.0, 2.0})
        for (double nu : {0.0, 1.0}) {
            CAPTURE(r);
            CAPTURE(nu);
            const double lhs = oracles::hartman_watson_laplace(r, nu).value;
            CHECK(std::abs(lhs - oracles::bessel_i_series(nu, r)) < 1e-6);
        }
}

TEST_CASE("Bessel series reproduces the standard library") {
    for (double nu : {0.0, 0.5, 1.0, 3.0})
        for (double r : {0.01, 1.0, 10.0})
            CHECK(oracles::bessel_i_series(nu, r) == doctest::Approx(std::cyl_bessel_i(nu, r)).epsilon(1e-13));
}

TEST_CASE("a_t(.; x) is a probability density") {
    for (double t : {0.5, 1.0, 2.0, 4.0})
        for (double x : {-1.0, 0.0, 1.0}) {
            CAPTURE(t);
            CAPTURE(x);
            CHECK(std::abs(a_mass(t, x) - 1.0) < 1e-6);
        }
}

TEST_CASE("a_t is normalized at small t") {
    for (double t : {0.01, 0.05}) CHECK(std::abs(a_mass(t, 0.0) - 1.0) < 1e-6);
}

TEST_CASE("f_lambda at lambda = 2 is a_1") {
    for (double y : {0.3, 1.0, 2.5})
        for (double x : {-0.5, 0.0, 0.7})
            CHECK(density_f_lambda(2.0, y, x).value == doctest::Approx(yor_density_a(1.0, y, x).value).epsilon(1e-14));
}

TEST_CASE("f_lambda integrates to one") {
    for (double lambda : {1.0, 3.0}) {
        auto f = [&](double s) { return std::exp(s) * density_f_lambda(lambda, std::exp(s), 0.2).value; };
        CHECK(quad::integrate(f, -12.0, 12.0, 1e-14, 1e-10).value == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("h agrees with the K0 closed form and the direct quadrature") {
    for (double y : {0.2, 0.5, 1.0, 2.0, 10.0})
        for (double x : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
            CAPTURE(y);
            CAPTURE(x);
            const double ref = h_closed_form(y, x);
            CHECK(h_kernel(y, x).value == doctest::Approx(ref).epsilon(1e-10));
            CHECK(h_kernel_direct(y, x).value == doctest::Approx(ref).epsilon(1e-8));
        }
}

TEST_CASE("t a_t / h tends to one") {
    for (double y : {0.5, 1.0, 2.0})
        for (double x : {-1.0, 0.0, 1.0}) {
            CAPTURE(y);
            CAPTURE(x);
            const double h = h_kernel(y, x).value;
            double prev = INFINITY;
            for (double t : {50.0, 100.0, 200.0, 500.0}) {
                const double dev = std::abs(t * yor_density_a(t, y, x).value / h - 1.0);
                CHECK(dev < prev);
                prev = dev;
            }
            CHECK(prev < 0.02);
        }
}

TEST_CASE("envelope bounds t a_t with the default constant") {
    const QuadratureConfig cfg;
    for (double t : {1.0, 3.0, 30.0, 300.0})
        for (double y : {0.05, 0.5, 2.0, 20.0})
            for (double x : {-2.0, 0.0, 2.0}) {
                CAPTURE(t);
                CAPTURE(y);
                CAPTURE(x);
                CHECK(t * yor_density_a(t, y, x).value <= a_bound(t, y, x, cfg.bound_constant));
            }
}

TEST_CASE("heat kernel") {
    CHECK(heat_kernel(1.0, 0.0) == doctest::Approx(1.0 / std::sqrt(2.0 * M_PI)).epsilon(1e-15));
    CHECK(heat_kernel(2.0, 1.0) == doctest::Approx(std::exp(-0.25) / std::sqrt(4.0 * M_PI)).epsilon(1e-15));
}

TEST_CASE("argument validation") {
    CHECK_THROWS_AS(theta(1.0, 0.0), InvalidArgument);
    CHECK_THROWS_AS(theta(-1.0, 1.0), InvalidArgument);
    CHECK_THROWS_AS(theta(1.0, 1e-8), DomainRestriction);
    CHECK_THROWS_AS(yor_density_a(1.0, 0.0, 0.0), InvalidArgument);
    CHECK_THROWS_AS(h_kernel(-1.0, 0.0), InvalidArgument);
    CHECK_THROWS_AS(a_bound(0.5, 1.0, 0.0, 2.0), InvalidArgument);
    QuadratureConfig bad;
    bad.rel_tol = 0.0;
    CHECK_THROWS_AS(theta(1.0, 1.0, bad), InvalidArgument);
}

TEST_CASE("extended precision admits smaller t for the panel method") {
    QuadratureConfig cfg;
    cfg.theta_method = ThetaMethod::OscillatoryPanels;
    CHECK(cfg.effective_min_t() == doctest::Approx(0.1));
    CHECK_THROWS_AS(theta(1.0, 0.05, cfg), DomainRestriction);
    cfg.extended_precision = true;
    CHECK(cfg.effective_min_t() == doctest::Approx(0.02));
    CHECK_THROWS_AS(theta(1.0, 0.01, cfg), DomainRestriction);
}

TEST_CASE("extended-precision panels match the references below t = 0.1") {
    QuadratureConfig cfg;
    cfg.theta_method = ThetaMethod::OscillatoryPanels;
    cfg.extended_precision = true;
    for (const auto& ref : oracles::theta_references()) {
        if (ref.t > 1.0) continue;
        CAPTURE(ref.r);
        CAPTURE(ref.t);
        const KernelValue v = theta(ref.r, ref.t, cfg);
        CHECK(v.value == doctest::Approx(ref.value).epsilon(1e-9));
        CHECK(v.est_error <= 1e-9 * ref.value + cfg.abs_tol);
        CHECK_FALSE(v.precision_loss);
    }
}
