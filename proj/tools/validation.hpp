#pragma once

// Bundled validation suite behind `validate` and `validate-kernels`.

#include "loclen/limiting_density.hpp"
#include "loclen/monte_carlo.hpp"

#include <string>
#include <vector>

namespace loclen::cli {

struct CheckRow {
    std::string function;
    std::string args;
    double value = 0.0;
    double est_error = 0.0;
    double oracle = 0.0;
    double tolerance = 0.0;

    double abs_diff() const;
    bool pass() const;
};

/// Kernel identities against independent references.
std::vector<CheckRow> kernel_identity_suite(const kernels::QuadratureConfig& cfg);

/// Monte Carlo and analytic cross-checks at reduced sample sizes.
std::vector<CheckRow> cross_check_suite(const density::CubatureConfig& cfg, Seed seed, mc::RunOptions run);

}  // namespace loclen::cli
