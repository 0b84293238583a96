#pragma once

// Monte Carlo estimators built on the exact path samplers.
//
// Sample i always draws from Rng(seed.child(i)). Samples are grouped into a
// fixed number of chunks whose partial statistics are merged in chunk order,
// so results are bit-identical for any thread count.

#include "loclen/random.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace loclen::mc {

struct CurveEstimate {
    std::vector<double> xs;
    std::vector<double> values;
    std::vector<double> std_errors;
    std::uint64_t n_samples = 0;
    double grid_step = 0.0;
    /// Points with std_error/value > 0.5; their values are noise.
    std::vector<bool> unreliable;
};

struct TailFitResult {
    double exponent = 0.0;
    double amplitude = 0.0;
    double x_lo = 0.0;
    double x_hi = 0.0;
    double r_squared = 0.0;
    double exponent_stderr = 0.0;
    double amplitude_stderr = 0.0;
    int points = 0;
};

struct RunOptions {
    /// 0 selects std::thread::hardware_concurrency().
    unsigned threads = 0;
};

/// rho_L(x) = e^{B(x)} / int_0^L e^B on the grid of a bridge (values[0..N],
/// values[N] = values[0]); returns N periodic values with Riemann mass 1.
std::vector<double> rho_from_bridge(const std::vector<double>& bridge, double delta);

/// int_0^L E rho_L(y) rho_L(y+x) dy (= L E rho_L(0) rho_L(x)) with periodic
/// wraparound. Every x must be a multiple of delta.
CurveEstimate mc_rho_L_covariance(double L, const std::vector<double>& xs, std::uint64_t n, double delta,
                                  Seed seed, RunOptions opt = {});

/// E int rho_inf(y) rho_inf(y+x) dy with rho_inf built from a two-sided
/// Bessel-3 process on [-M, M].
CurveEstimate mc_g_infinity(const std::vector<double>& xs, double M, std::uint64_t n, double delta, Seed seed,
                            RunOptions opt = {});

struct ModeProfile {
    /// Mean of rho_L(x_L + x) over bridges of length L.
    CurveEstimate bridge;
    /// Mean of rho_inf(x_o + x) for a two-sided Bessel-3 on [-M_inf, M_inf]
    /// seen on a grid with uniformly random phase, x_o the grid mode.
    CurveEstimate limit;
};

/// Profiles on the grid x = k*delta, |x| <= M.
ModeProfile mc_mode_profile(double L, double M, std::uint64_t n, double delta, Seed seed, double M_inf = 64.0,
                            RunOptions opt = {});

struct Bins {
    double lo = 0.0;
    double hi = 1.0;
    int count = 1;
};

struct Histogram {
    /// xs are bin centres, values are densities, std_errors binomial.
    CurveEstimate curve;
    std::vector<double> edges;
    std::vector<std::uint64_t> counts;
    std::uint64_t below = 0;
    std::uint64_t above = 0;
    double min_functional = 0.0;

    /// Fraction of all samples accounted for by bins plus overflow.
    double mass() const;
};

/// Samples of int_0^t e^{c W_s} ds given W_t = x (trapezoid on the grid).
std::vector<double> sample_exp_functional(double t, double x, double c, std::uint64_t n, double delta, Seed seed,
                                          RunOptions opt = {});

/// Histogram oracle for a_t(.; x) (c = 2) or, with c = lambda and t = 1, for
/// f_lambda(.; x).
Histogram oracle_a_density(double t, double x, Bins bins, std::uint64_t n, double delta, Seed seed, double c = 2.0,
                           RunOptions opt = {});

/// Weighted least squares of log(value) on log(x) over [x_lo, x_hi].
TailFitResult fit_tail(const CurveEstimate& curve, std::pair<double, double> window);

struct MomentEstimate {
    /// Single point: xs = {p}, values = {median}, std_errors = {IQR / 1.349 * 1.2533 / sqrt(n)}.
    CurveEstimate curve;
    double q25 = 0.0;
    double q75 = 0.0;
    /// Mean across realizations; equals the annealed moment on the window.
    double mean = 0.0;
    double mean_se = 0.0;
};

/// p-th absolute moment of x -> int rho_inf(y) rho_inf(y+x) dy per
/// realization, summarized across realizations.
MomentEstimate mc_quenched_moment(double p, double M, std::uint64_t n, double delta, Seed seed,
                                  RunOptions opt = {});

}  // namespace loclen::mc
