#include "loclen/polymer.hpp"

#include "loclen/error.hpp"
#include "loclen/parallel.hpp"
#include "loclen/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace loclen::polymer {

namespace {

double trapezoid_mass(const std::vector<double>& v, double dx) {
    quad::CompensatedSum<double> s;
    for (double x : v) s.add(x);
    return (s.value() - 0.5 * (v.front() + v.back())) * dx;
}

// Sampled Gaussian on the lattice, normalized to mass 1, with its width tuned
// so that the lattice variance is exactly dt (plain sampling loses about
// 8 pi^2 (dt/dx^2) exp(-2 pi^2 dt/dx^2) of it to aliasing).
std::vector<double> heat_taps(double dt, double dx) {
    const int half = static_cast<int>(std::ceil(12.0 * std::sqrt(dt) / dx)) + 2;
    std::vector<double> taps(2 * half + 1);
    auto build = [&](double var) {
        double sum = 0.0, m2 = 0.0;
        for (int m = -half; m <= half; ++m) {
            const double x = m * dx;
            taps[m + half] = std::exp(-x * x / (2.0 * var));
            sum += taps[m + half];
            m2 += x * x * taps[m + half];
        }
        for (double& w : taps) w /= sum;
        return m2 / sum;
    };
    double var = dt;
    for (int it = 0; it < 50; ++it) {
        const double got = build(var);
        if (std::abs(got - dt) <= 1e-15 * dt) break;
        var *= dt / got;
    }
    build(var);
    return taps;
}

}  // namespace

double min_half_width(double t) { return 6.0 * std::sqrt(t) + 2.0; }

PolymerField evolve_she(double t, double dx, double dt, double half_width, Seed seed, SheOptions opt) {
    detail::require(t > 0.0 && dx > 0.0 && dt > 0.0, "evolve_she: t, dx, dt must be positive");
    detail::require(dt <= 0.5 * dx * dx * (1.0 + 1e-12), "evolve_she: stability requires dt <= dx^2/2");
    detail::require(half_width >= min_half_width(t) * (1.0 - 1e-12), "evolve_she: half_width must be >= 6 sqrt(t) + 2");
    const double steps_real = t / dt;
    const auto steps = static_cast<std::uint64_t>(std::llround(steps_real));
    detail::require(steps >= 1 && std::abs(steps_real - static_cast<double>(steps)) <= 1e-9 * steps_real,
                    "evolve_she: dt must divide t");
    const auto half_cells = static_cast<std::size_t>(std::ceil(half_width / dx - 1e-9));
    const std::size_t J = 2 * half_cells + 1;

    PolymerField f;
    f.t = t;
    f.dt = dt;
    f.dx = dx;
    f.origin = -static_cast<double>(half_cells) * dx;
    f.u.assign(J, 0.0);
    f.u[half_cells] = 1.0 / dx;

    const std::vector<double> taps = heat_taps(dt, dx);
    const int half = static_cast<int>(taps.size() / 2);
    const double amp = std::sqrt(dt / dx);
    const double ito = dt / (2.0 * dx);
    Rng rng(seed);
    std::vector<double> next(J);
    for (std::uint64_t s = 0; s < steps; ++s) {
        // absorbing boundary: mass leaving [0, J) is dropped
        for (std::size_t j = 0; j < J; ++j) {
            double acc = 0.0;
            const int lo = std::max(-half, -static_cast<int>(j));
            const int hi = std::min(half, static_cast<int>(J - 1 - j));
            for (int m = lo; m <= hi; ++m) acc += taps[m + half] * f.u[j + m];
            next[j] = acc;
        }
        if (opt.zero_noise) {
            f.u.swap(next);
        } else {
            double top = 0.0;
            for (std::size_t j = 0; j < J; ++j) {
                next[j] *= std::exp(amp * rng.normal() - ito);
                top = std::max(top, next[j]);
            }
            f.u.swap(next);
            if (!(top > 0.0) || !std::isfinite(top)) throw NumericDegeneracy("evolve_she: mass underflow");
            if (top > 1e100 || top < 1e-100) {
                const double ls = std::log(top);
                const double inv = 1.0 / top;
                for (double& v : f.u) v *= inv;
                f.log_scale += ls;
            }
        }
    }
    const double mass = trapezoid_mass(f.u, dx);
    if (!(mass > 0.0) || !std::isfinite(mass)) throw NumericDegeneracy("evolve_she: non-finite or vanishing mass");
    const auto band = std::min(J / 2, static_cast<std::size_t>(std::ceil(1.0 / dx)));
    double edge = 0.0;
    for (std::size_t j = 0; j < band; ++j) edge += f.u[j] + f.u[J - 1 - j];
    if (edge * dx > opt.boundary_tolerance * mass)
        throw NumericDegeneracy("evolve_she: boundary mass fraction " + std::to_string(edge * dx / mass) +
                                " exceeds tolerance; increase half_width");
    return f;
}

std::vector<PolymerField> simulate_ensemble(double t, double dx, double dt, double half_width, std::uint64_t n,
                                            Seed seed, SheOptions opt, mc::RunOptions run) {
    detail::require(n >= 1, "simulate_ensemble: n must be >= 1");
    std::vector<PolymerField> out(n);
    parallel::for_chunks(n, n, run.threads, [&](std::uint64_t, std::uint64_t b, std::uint64_t e) {
        for (std::uint64_t i = b; i < e; ++i) out[i] = evolve_she(t, dx, dt, half_width, seed.child(i), opt);
    });
    return out;
}

DensityProfile endpoint_density(const PolymerField& field) {
    detail::require(field.u.size() >= 2, "endpoint_density: empty field");
    const double mass = trapezoid_mass(field.u, field.dx);
    if (!(mass > 0.0) || !std::isfinite(mass)) throw NumericDegeneracy("endpoint_density: non-finite mass");
    DensityProfile p;
    p.origin = field.origin;
    p.step = field.dx;
    p.values.resize(field.u.size());
    const double inv = 1.0 / mass;
    for (std::size_t j = 0; j < field.u.size(); ++j) p.values[j] = field.u[j] * inv;
    p.mode_index = static_cast<std::size_t>(std::max_element(p.values.begin(), p.values.end()) - p.values.begin());
    p.mode = field.x(p.mode_index);
    return p;
}

double quenched_variance(const PolymerField& field) {
    const DensityProfile rho = endpoint_density(field);
    const std::size_t J = rho.values.size();
    quad::CompensatedSum<double> m1, m2;
    for (std::size_t j = 0; j < J; ++j) {
        const double w = (j == 0 || j + 1 == J) ? 0.5 : 1.0;
        const double x = field.x(j);
        m1.add(w * x * rho.values[j]);
        m2.add(w * x * x * rho.values[j]);
    }
    const double mean = m1.value() * field.dx;
    return std::max(0.0, m2.value() * field.dx - mean * mean);
}

Estimate annealed_variance(const std::vector<PolymerField>& fields) {
    detail::require(!fields.empty(), "annealed_variance: empty ensemble");
    parallel::Welford w(1);
    for (const auto& f : fields) w.add({quenched_variance(f)});
    return Estimate{w.mean[0], w.std_error(0), w.count};
}

std::vector<double> separation_density(const PolymerField& field) {
    const DensityProfile rho = endpoint_density(field);
    const std::size_t J = rho.values.size();
    std::vector<double> g(2 * J - 1);
    for (std::size_t s = 0; s < J; ++s) {
        double acc = 0.0;
        for (std::size_t k = 0; k + s < J; ++k) acc += rho.values[k] * rho.values[k + s];
        g[J - 1 + s] = acc * field.dx;
        g[J - 1 - s] = acc * field.dx;
    }
    return g;
}

EllStatistics ell_statistics(const std::vector<PolymerField>& fields, const std::vector<double>& xs) {
    detail::require(fields.size() >= 100, "ell_statistics: need an ensemble of at least 100 fields");
    const double dx = fields.front().dx;
    const std::size_t J = fields.front().u.size();
    for (const auto& f : fields)
        detail::require(f.dx == dx && f.u.size() == J && f.origin == fields.front().origin,
                        "ell_statistics: fields live on different grids");
    std::vector<std::ptrdiff_t> lags;
    for (double x : xs) {
        const double q = x / dx;
        const double r = std::round(q);
        detail::require(std::abs(q - r) <= 1e-9 * std::max(1.0, std::abs(r)), "ell_statistics: x must be a multiple of dx");
        detail::require(std::abs(r) < static_cast<double>(J), "ell_statistics: |x| exceeds the grid");
        lags.push_back(static_cast<std::ptrdiff_t>(r));
    }
    parallel::Welford wg(xs.size()), we(1);
    std::vector<double> obs(xs.size());
    for (const auto& f : fields) {
        const std::vector<double> g = separation_density(f);
        for (std::size_t i = 0; i < lags.size(); ++i) obs[i] = g[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(J) - 1 + lags[i])];
        wg.add(obs);
        quad::CompensatedSum<double> m2;
        for (std::size_t k = 0; k < g.size(); ++k) {
            const double x = (static_cast<double>(k) - static_cast<double>(J - 1)) * dx;
            m2.add(x * x * g[k]);
        }
        we.add({m2.value() * dx});
    }
    EllStatistics out;
    out.gbar.xs = xs;
    out.gbar.n_samples = wg.count;
    out.gbar.grid_step = dx;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        out.gbar.values.push_back(wg.mean[i]);
        out.gbar.std_errors.push_back(wg.std_error(i));
        out.gbar.unreliable.push_back(!(wg.std_error(i) <= 0.5 * std::abs(wg.mean[i])));
    }
    out.ell2 = Estimate{we.mean[0], we.std_error(0), we.count};
    return out;
}

}  // namespace loclen::polymer
