#pragma once

// Exact-law path samplers on uniform grids.
//
// Every sampler is a pure function of its arguments and a Seed. The fill_*
// variants write into a caller-owned buffer and draw from a caller-owned Rng;
// the Monte Carlo estimators use them to avoid per-sample allocation.

#include "loclen/random.hpp"

#include <cmath>
#include <cstddef>
#include <ostream>
#include <vector>

namespace loclen::paths {

enum class PathKind { BrownianMotion, BrownianBridge, Bessel3, Bessel3Bridge, Excursion };

struct PathSample {
    double origin = 0.0;
    double step = 1.0;
    std::vector<double> values;
    PathKind kind = PathKind::BrownianMotion;

    double location(std::size_t i) const { return origin + static_cast<double>(i) * step; }
};

struct ArgMax {
    std::size_t index;
    double location;
    double value;
};

PathSample sample_brownian_motion(double T, std::size_t n, Seed seed);
PathSample sample_brownian_bridge(double L, std::size_t n, Seed seed);
PathSample sample_bessel3(double T, std::size_t n, Seed seed);
/// Bessel-3 bridge on [0, L] through the time change s = y / (1 - y/L).
PathSample sample_bessel3_bridge(double L, std::size_t n, Seed seed);
/// Modulus of a 3-dimensional Brownian bridge built from three independent
/// one-dimensional bridges. Same law as sample_bessel3_bridge.
PathSample sample_bridge_modulus_3d(double L, std::size_t n, Seed seed);

/// Rotates a bridge so its first maximum sits at the origin and returns
/// max - path, a Brownian excursion of the same length.
PathSample vervaat_recenter(const PathSample& bridge);

/// First index attaining the maximum.
ArgMax argmax_of_path(const PathSample& path);

/// CSV with header `x,value`, 17 significant digits.
void write_csv(const PathSample& path, std::ostream& os);

// Buffer-filling kernels. out is resized to n.
void fill_brownian_bridge(Rng& rng, double L, std::size_t n, std::vector<double>& out);
void fill_bessel3(Rng& rng, double T, std::size_t n, std::vector<double>& out);
/// Bessel-3 from 0 sampled at the given increasing times (times[0] may be 0).
void fill_bessel3_at(Rng& rng, const std::vector<double>& times, std::vector<double>& out);

/// One exact Bessel-3 transition over a time step dt.
inline double bessel3_step(Rng& rng, double r, double dt) {
    const double sd = std::sqrt(dt);
    const double a = r + sd * rng.normal();
    return std::sqrt(a * a + 2.0 * dt * rng.exponential());
}

}  // namespace loclen::paths
