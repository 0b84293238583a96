#pragma once

// Independent reference computations used by the tests, the acceptance
// binary and the `validate` command.

#include "loclen/yor_kernels.hpp"

#include <functional>
#include <span>
#include <vector>

namespace loclen::oracles {

/// I_nu(r) = sum_k (r/2)^{2k+nu} / (k! Gamma(k+nu+1)), summed until the
/// terms stop changing the total.
double bessel_i_series(double nu, double r);

/// int_0^inf e^{-nu^2 t / 2} theta_r(t) dt, integrated in s = log t.
kernels::KernelValue hartman_watson_laplace(double r, double nu, const kernels::QuadratureConfig& cfg = {});

struct KsResult {
    double statistic = 0.0;
    double p_value = 0.0;
};

/// Asymptotic Kolmogorov distribution with the Stephens small-sample
/// correction.
double kolmogorov_survival(double lambda);

KsResult ks_one_sample(std::vector<double> samples, const std::function<double(double)>& cdf);
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

/// CDF of c * |N| with N a standard 3-dimensional Gaussian.
double chi3_cdf(double u, double c);

struct ThetaReference {
    double r;
    double t;
    double value;
};

/// theta_r(t) from the real oscillatory integral evaluated in 80-digit
/// arithmetic (mpmath), rounded to double. See tests/oracles/theta_reference.py.
std::span<const ThetaReference> theta_references();

/// lambda from nested adaptive quadrature (scipy) of the K0 closed form of h.
/// See tests/oracles/lambda_reference.py.
double lambda_reference();

}  // namespace loclen::oracles
