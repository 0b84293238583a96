#pragma once

// Lattice stochastic heat equation du = 1/2 u'' dt + u dW by operator
// splitting: exact Gaussian smoothing over dt, then multiplication by
// exp(sqrt(dt/dx) xi - dt/(2 dx)) per cell. The update keeps u positive and
// makes the total mass a discrete martingale.

#include "loclen/monte_carlo.hpp"
#include "loclen/random.hpp"

#include <cstdint>
#include <vector>

namespace loclen::polymer {

struct PolymerField {
    double t = 0.0;
    double dt = 0.0;
    double origin = 0.0;  ///< x of u[0]; the grid is symmetric about 0
    double dx = 0.0;
    /// u(t, x_j) = u[j] * exp(log_scale)
    std::vector<double> u;
    double log_scale = 0.0;

    double x(std::size_t j) const { return origin + static_cast<double>(j) * dx; }
};

struct SheOptions {
    /// Replace every xi by 0 (the Ito correction is dropped as well).
    bool zero_noise = false;
    /// Largest admissible mass fraction within one unit of either boundary.
    double boundary_tolerance = 1e-8;
};

/// Smallest half-width accepted for time t: 6 sqrt(t) + 2.
double min_half_width(double t);

PolymerField evolve_she(double t, double dx, double dt, double half_width, Seed seed, SheOptions opt = {});

/// n independent fields; realization i uses seed.child(i).
std::vector<PolymerField> simulate_ensemble(double t, double dx, double dt, double half_width, std::uint64_t n,
                                            Seed seed, SheOptions opt = {}, mc::RunOptions run = {});

struct DensityProfile {
    double origin = 0.0;
    double step = 0.0;
    std::vector<double> values;
    std::size_t mode_index = 0;
    double mode = 0.0;
};

/// rho = u / int u (trapezoid); mode is the first grid maximum.
DensityProfile endpoint_density(const PolymerField& field);

/// int x^2 rho - (int x rho)^2.
double quenched_variance(const PolymerField& field);

struct Estimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::uint64_t n = 0;
};

Estimate annealed_variance(const std::vector<PolymerField>& fields);

/// g(t, x) = int rho(y) rho(y + x) dy at every lag of the grid, x = k dx for
/// k = -(J-1)..(J-1).
std::vector<double> separation_density(const PolymerField& field);

struct EllStatistics {
    /// annealed gbar(t, x) on the requested lags
    mc::CurveEstimate gbar;
    /// E of the quenched second moment of the separation
    Estimate ell2;
};

/// Needs at least 100 fields; xs must be multiples of the common grid step.
EllStatistics ell_statistics(const std::vector<PolymerField>& fields, const std::vector<double>& xs);

}  // namespace loclen::polymer
