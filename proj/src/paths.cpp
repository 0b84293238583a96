#include "loclen/paths.hpp"

#include "loclen/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

namespace loclen::paths {

namespace {

void check_grid(double length, std::size_t n, const char* who) {
    detail::require(std::isfinite(length) && length > 0.0, std::string(who) + ": length must be positive");
    detail::require(n >= 2, std::string(who) + ": need at least 2 grid points");
}

}  // namespace

void fill_brownian_bridge(Rng& rng, double L, std::size_t n, std::vector<double>& out) {
    out.resize(n);
    const double dt = L / static_cast<double>(n - 1);
    const double sd = std::sqrt(dt);
    out[0] = 0.0;
    for (std::size_t i = 1; i < n; ++i) out[i] = out[i - 1] + sd * rng.normal();
    const double end = out[n - 1];
    const double inv = 1.0 / static_cast<double>(n - 1);
    for (std::size_t i = 1; i + 1 < n; ++i) out[i] -= end * (static_cast<double>(i) * inv);
    out[n - 1] = 0.0;
}

void fill_bessel3(Rng& rng, double T, std::size_t n, std::vector<double>& out) {
    out.resize(n);
    const double dt = T / static_cast<double>(n - 1);
    out[0] = 0.0;
    for (std::size_t i = 1; i < n; ++i) out[i] = bessel3_step(rng, out[i - 1], dt);
}

void fill_bessel3_at(Rng& rng, const std::vector<double>& times, std::vector<double>& out) {
    out.resize(times.size());
    double r = 0.0, prev = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double dt = times[i] - prev;
        if (dt > 0.0) r = bessel3_step(rng, r, dt);
        out[i] = r;
        prev = times[i];
    }
}

PathSample sample_brownian_motion(double T, std::size_t n, Seed seed) {
    check_grid(T, n, "sample_brownian_motion");
    Rng rng(seed);
    PathSample p;
    p.step = T / static_cast<double>(n - 1);
    p.kind = PathKind::BrownianMotion;
    p.values.resize(n);
    const double sd = std::sqrt(p.step);
    for (std::size_t i = 1; i < n; ++i) p.values[i] = p.values[i - 1] + sd * rng.normal();
    return p;
}

PathSample sample_brownian_bridge(double L, std::size_t n, Seed seed) {
    check_grid(L, n, "sample_brownian_bridge");
    Rng rng(seed);
    PathSample p;
    p.step = L / static_cast<double>(n - 1);
    p.kind = PathKind::BrownianBridge;
    fill_brownian_bridge(rng, L, n, p.values);
    return p;
}

PathSample sample_bessel3(double T, std::size_t n, Seed seed) {
    check_grid(T, n, "sample_bessel3");
    Rng rng(seed);
    PathSample p;
    p.step = T / static_cast<double>(n - 1);
    p.kind = PathKind::Bessel3;
    fill_bessel3(rng, T, n, p.values);
    return p;
}

PathSample sample_bessel3_bridge(double L, std::size_t n, Seed seed) {
    check_grid(L, n, "sample_bessel3_bridge");
    Rng rng(seed);
    PathSample p;
    p.step = L / static_cast<double>(n - 1);
    p.kind = PathKind::Bessel3Bridge;
    // Bessel-3 sampled exactly at the time-changed instants y/(1-y/L).
    std::vector<double> times(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double y = static_cast<double>(i) * p.step;
        times[i] = y / (1.0 - y / L);
    }
    std::vector<double> b;
    fill_bessel3_at(rng, times, b);
    p.values.resize(n);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double y = static_cast<double>(i) * p.step;
        p.values[i] = (1.0 - y / L) * b[i];
    }
    p.values[n - 1] = 0.0;
    return p;
}

PathSample sample_bridge_modulus_3d(double L, std::size_t n, Seed seed) {
    check_grid(L, n, "sample_bridge_modulus_3d");
    Rng rng(seed);
    std::vector<double> a, b, c;
    fill_brownian_bridge(rng, L, n, a);
    fill_brownian_bridge(rng, L, n, b);
    fill_brownian_bridge(rng, L, n, c);
    PathSample p;
    p.step = L / static_cast<double>(n - 1);
    p.kind = PathKind::Bessel3Bridge;
    p.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) p.values[i] = std::sqrt(a[i] * a[i] + b[i] * b[i] + c[i] * c[i]);
    p.values[0] = 0.0;
    p.values[n - 1] = 0.0;
    return p;
}

ArgMax argmax_of_path(const PathSample& path) {
    detail::require(!path.values.empty(), "argmax_of_path: empty path");
    const auto it = std::max_element(path.values.begin(), path.values.end());
    const auto idx = static_cast<std::size_t>(it - path.values.begin());
    return ArgMax{idx, path.location(idx), *it};
}

PathSample vervaat_recenter(const PathSample& bridge) {
    detail::require(bridge.kind == PathKind::BrownianBridge, "vervaat_recenter: path must be a Brownian bridge");
    detail::require(bridge.values.size() >= 3, "vervaat_recenter: need at least 3 points");
    const std::size_t n = bridge.values.size();
    const std::size_t period = n - 1;  // last point is the first one, periodically
    std::size_t m = 0;
    for (std::size_t i = 1; i < period; ++i)
        if (bridge.values[i] > bridge.values[m]) m = i;
    const double top = bridge.values[m];
    PathSample out;
    out.origin = 0.0;
    out.step = bridge.step;
    out.kind = PathKind::Excursion;
    out.values.resize(n);
    for (std::size_t k = 0; k < period; ++k) out.values[k] = top - bridge.values[(m + k) % period];
    out.values[0] = 0.0;
    out.values[n - 1] = 0.0;
    return out;
}

void write_csv(const PathSample& path, std::ostream& os) {
    os << "x,value\n";
    char buf[64];
    for (std::size_t i = 0; i < path.values.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", path.location(i), path.values[i]);
        os << buf;
    }
}

}  // namespace loclen::paths
