#include "validation.hpp"

#include "loclen/oracles.hpp"
#include "loclen/polymer.hpp"
#include "loclen/quadrature.hpp"

#include <cmath>
#include <sstream>

namespace loclen::cli {

namespace {

std::string args_of(std::initializer_list<std::pair<const char*, double>> kv) {
    std::ostringstream os;
    os.precision(17);
    bool first = true;
    for (const auto& [k, v] : kv) {
        if (!first) os << ';';
        os << k << '=' << v;
        first = false;
    }
    return os.str();
}

double h_closed_form(double y, double x) {
    const double r = std::exp(x) / y;
    return std::exp(x - (1.0 + std::exp(2.0 * x)) / (2.0 * y)) * std::cyl_bessel_k(0.0, r) / (r * y * y);
}

}  // namespace

double CheckRow::abs_diff() const { return std::abs(value - oracle); }

bool CheckRow::pass() const { return abs_diff() <= tolerance; }

std::vector<CheckRow> kernel_identity_suite(const kernels::QuadratureConfig& cfg) {
    std::vector<CheckRow> rows;
    for (double r : {0.5, 1.0, 2.0})
        for (double nu : {0.0, 1.0}) {
            const kernels::KernelValue v = oracles::hartman_watson_laplace(r, nu, cfg);
            rows.push_back({"hartman_watson_laplace", args_of({{"r", r}, {"nu", nu}}), v.value, v.est_error,
                            oracles::bessel_i_series(nu, r), 1e-4});
        }
    for (const auto& ref : oracles::theta_references()) {
        if (ref.t < cfg.effective_min_t()) continue;
        const kernels::KernelValue v = kernels::theta(ref.r, ref.t, cfg);
        rows.push_back({"theta", args_of({{"r", ref.r}, {"t", ref.t}}), v.value, v.est_error, ref.value,
                        1e-8 * ref.value});
    }
    for (double t : {0.5, 1.0, 2.0, 4.0})
        for (double x : {-1.0, 0.0, 1.0}) {
            auto f = [&](double s) { return std::exp(s + kernels::log_yor_density_a(t, s, x, cfg).log_value); };
            const quad::Result m = quad::integrate(f, -12.0, 12.0, 1e-14, 1e-10);
            rows.push_back({"yor_density_a_mass", args_of({{"t", t}, {"x", x}}), m.value, m.abs_error, 1.0, 1e-3});
        }
    for (double y : {0.5, 1.0, 2.0})
        for (double x : {-1.0, 0.0, 1.0}) {
            const kernels::KernelValue h = kernels::h_kernel(y, x, cfg);
            const double ref = h_closed_form(y, x);
            rows.push_back({"h_kernel", args_of({{"y", y}, {"x", x}}), h.value, h.est_error, ref, 1e-9 * ref});
            const kernels::KernelValue a = kernels::yor_density_a(500.0, y, x, cfg);
            rows.push_back({"t_a_over_h", args_of({{"t", 500.0}, {"y", y}, {"x", x}}), 500.0 * a.value / h.value,
                            500.0 * a.est_error / h.value, 1.0, 0.02});
        }
    for (double y : {0.5, 2.0}) {
        const kernels::KernelValue f = kernels::density_f_lambda(2.0, y, 0.3, cfg);
        const kernels::KernelValue a = kernels::yor_density_a(1.0, y, 0.3, cfg);
        rows.push_back({"density_f_lambda", args_of({{"lambda", 2.0}, {"y", y}, {"x", 0.3}}), f.value, f.est_error,
                        a.value, 1e-13 * a.value});
    }
    return rows;
}

std::vector<CheckRow> cross_check_suite(const density::CubatureConfig& cfg, Seed seed, mc::RunOptions run) {
    std::vector<CheckRow> rows;
    {
        const density::DensityPoint l = density::lambda_const(cfg);
        rows.push_back({"lambda_const", "", l.value, l.est_error, oracles::lambda_reference(), 1e-6});
    }
    {
        const double L = 8.0, x = 2.0;
        const density::DensityPoint a = density::two_point_L(L, x, cfg);
        const mc::CurveEstimate m = mc::mc_rho_L_covariance(L, {x}, 20000, 0.01, seed.child(0), run);
        const double se = std::hypot(L * a.est_error, m.std_errors[0]);
        rows.push_back({"L*two_point_L_vs_mc_rho_L_covariance", args_of({{"L", L}, {"x", x}, {"n", 20000}}),
                        L * a.value, se, m.values[0], 3.0 * se});
    }
    {
        const mc::Histogram h = mc::oracle_a_density(1.0, 0.0, mc::Bins{0.9, 1.1, 1}, 20000, 0.01, seed.child(1), 2.0, run);
        auto a = [&](double y) { return kernels::yor_density_a(1.0, y, 0.0, cfg).value; };
        const double p = quad::integrate(a, 0.9, 1.1, 1e-14, 1e-10).value;
        const double phat = static_cast<double>(h.counts[0]) / 20000.0;
        const double sd = std::sqrt(p * (1.0 - p) / 20000.0);
        rows.push_back({"oracle_a_density_bin", args_of({{"t", 1.0}, {"x", 0.0}, {"lo", 0.9}, {"hi", 1.1}}), phat, sd,
                        p, 2.576 * sd});
    }
    {
        polymer::SheOptions opt;
        opt.zero_noise = true;
        const polymer::PolymerField f = polymer::evolve_she(1.0, 0.02, 2e-4, polymer::min_half_width(1.0), seed, opt);
        rows.push_back({"quenched_variance_zero_noise", args_of({{"t", 1.0}, {"dx", 0.02}, {"dt", 2e-4}}),
                        polymer::quenched_variance(f), 0.0, 1.0, 1e-3});
    }
    {
        mc::CurveEstimate c;
        for (int i = 1; i <= 16; ++i) {
            c.xs.push_back(i);
            c.values.push_back(2.0 * std::pow(i, -1.5));
        }
        const mc::TailFitResult r = mc::fit_tail(c, {1.0, 16.0});
        rows.push_back({"fit_tail_exponent_synthetic", "", r.exponent, r.exponent_stderr, -1.5, 1e-12});
    }
    return rows;
}

}  // namespace loclen::cli
