#pragma once

// Hartman-Watson / Yor special functions.
//
//   theta_r(t)   Hartman-Watson kernel (Laplace transform in nu^2/2 is I_nu(r))
//   a_t(y; x)    density of int_0^t exp(2 W_s) ds given W_t = x
//   f_lambda     density of int_0^1 exp(lambda W_s) ds given W_1 = x
//   h(y, x)      large-t limit of t * a_t(y; x)
//
// All densities are positive and span hundreds of orders of magnitude over the
// ranges the cubatures visit, so every kernel has a log-scaled variant. The
// value variants are thin wrappers that exponentiate.

#include <span>

namespace loclen::kernels {

enum class ThetaMethod {
    /// Integrates along the steepest-descent contour through the dominant
    /// saddle of the analytically continued integrand. The integrand is
    /// positive on that contour, so there is no cancellation at small t.
    SteepestDescent,
    /// Integrates the real oscillatory integral panel by panel between the
    /// zeros of sin(pi w / t). Loses about pi^2/(2t ln 10) digits.
    OscillatoryPanels,
};

struct QuadratureConfig {
    double rel_tol = 1e-6;
    double abs_tol = 1e-12;
    int max_subdivisions = 2000;
    /// Extra log-scale headroom when truncating semi-infinite integrals.
    double w_max_margin = 40.0;
    /// Smallest admissible t for theta and everything built on it.
    /// OscillatoryPanels additionally needs t >= 0.1 (0.02 with
    /// extended_precision).
    double min_t = 1e-6;
    /// OscillatoryPanels only: 160-digit MPFR arithmetic for the panel sum.
    bool extended_precision = false;
    ThetaMethod theta_method = ThetaMethod::SteepestDescent;
    /// Constant C of the envelope t*a_t(y;x) <= a_bound(t,y,x,C), t >= 1.
    /// Calibrated with calibrate_bound_constant() on the default grid.
    double bound_constant = 2.0;

    /// Throws InvalidArgument when a field violates its invariant.
    void validate() const;
    /// min_t after the extended-precision adjustment.
    double effective_min_t() const;
};

struct KernelValue {
    double value = 0.0;
    double est_error = 0.0;
    bool precision_loss = false;
};

/// A positive quantity stored as its logarithm, with a relative error bound.
struct LogValue {
    double log_value = 0.0;
    double rel_error = 0.0;
    bool precision_loss = false;

    KernelValue to_value() const;
};

double heat_kernel(double t, double x);

KernelValue theta(double r, double t, const QuadratureConfig& cfg = {});
/// theta_r(t) with r = exp(log_r); avoids forming r when it is extreme.
LogValue log_theta(double log_r, double t, const QuadratureConfig& cfg = {});

KernelValue yor_density_a(double t, double y, double x, const QuadratureConfig& cfg = {});
/// log a_t(exp(log_y); x).
LogValue log_yor_density_a(double t, double log_y, double x, const QuadratureConfig& cfg = {});

KernelValue density_f_lambda(double lambda, double y, double x, const QuadratureConfig& cfg = {});

/// h(y, x) through the substitution u = cosh w.
KernelValue h_kernel(double y, double x, const QuadratureConfig& cfg = {});
LogValue log_h_kernel(double log_y, double x, const QuadratureConfig& cfg = {});
/// h(y, x) by direct quadrature in w; an independent route for checks.
KernelValue h_kernel_direct(double y, double x, const QuadratureConfig& cfg = {});

/// Envelope C e^{x^2/2t} y^-2 e^{x-(1+e^{2x})/(2y)} [1 + y e^{-x} |x - log y|].
double a_bound(double t, double y, double x, double C);
double log_a_bound(double t, double log_y, double x, double C);

/// Smallest C such that t*a_t(y;x) <= a_bound(t,y,x,C) on the product grid,
/// multiplied by `safety`. Grid points where the density is below 1e-300 are
/// skipped.
double calibrate_bound_constant(std::span<const double> ts, std::span<const double> ys,
                                std::span<const double> xs, const QuadratureConfig& cfg,
                                double safety = 1.5);

}  // namespace loclen::kernels
