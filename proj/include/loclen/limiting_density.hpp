#pragma once

// Explicit formulas for the finite-L two-point function of rho_L, the limiting
// density g_inf of the localization length and its tail constant lambda.
//
// Every formula has the shape
//
//   c * int_R  w(y) J(y) dy,   J(y) = int int (z1+z2)^-2 k1(z1; y) k2(z2; y) dz1 dz2
//
// with k1, k2 in {a_t, h}. J is computed in zeta = log z by a trapezoid rule on
// separable node sets (spectrally accurate for these analytic integrands) with
// a step-halving error estimate. The outer y integral is a trapezoid rule
// on a window grown from the maximum of the log-integrand, halved until two
// successive levels agree.

#include "loclen/random.hpp"
#include "loclen/yor_kernels.hpp"

#include <cstdint>
#include <optional>
#include <utility>

namespace loclen::density {

struct CubatureConfig : kernels::QuadratureConfig {
    /// Cap on the half-width of the y window, in units of max(sigma, 1) with
    /// sigma the width of the Gaussian factor. The window grows from the
    /// maximum until the log-integrand has dropped by w_max_margin; if the cap
    /// cuts it first, the edge mass is added to est_error.
    double y_window_sigmas = 40.0;
    /// Fixed zeta range for both kernels; adaptive when empty.
    std::optional<std::pair<double, double>> z_log_range;
    double outer_rel_tol = 1e-4;
    /// Trapezoid step in zeta is zeta_step * min(1, sqrt(t)) for a_t and
    /// zeta_step for h; the error estimate compares with the doubled step.
    double zeta_step = 0.5;

    /// Monte Carlo fallback used by g_infinity when |x|/4 < min_t.
    std::uint64_t fallback_samples = 20000;
    double fallback_M = 64.0;
    double fallback_delta = 0.01;
    Seed fallback_seed{0x5eed, 0};

    void validate() const;
};

enum class Method { Analytic, MonteCarloFallback };

struct DensityPoint {
    double x = 0.0;
    double value = 0.0;
    double est_error = 0.0;
    Method method = Method::Analytic;
};

/// E rho_L(0) rho_L(x) for x in (0, L).
DensityPoint two_point_L(double L, double x, const CubatureConfig& cfg = {});

/// Annealed limiting density of the localization length, even in x.
DensityPoint g_infinity(double x, const CubatureConfig& cfg = {});

/// Tail constant: |x|^{3/2} g_inf(x) -> lambda.
DensityPoint lambda_const(const CubatureConfig& cfg = {}, bool swap_kernels = false);

/// x^{3/2} g_infinity(x).
DensityPoint tail_ratio(double x, const CubatureConfig& cfg = {});

/// int_0^L two_point_L(L, x) dx on composite Gauss-Legendre panels graded
/// geometrically towards both endpoints. The two end slivers of width
/// 4*min_t are filled with the value at the innermost node.
DensityPoint two_point_mass(double L, const CubatureConfig& cfg = {}, int panels_per_side = 12);

}  // namespace loclen::density
