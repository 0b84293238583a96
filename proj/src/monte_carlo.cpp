#include "loclen/monte_carlo.hpp"

#include "loclen/error.hpp"
#include "loclen/parallel.hpp"
#include "loclen/paths.hpp"
#include "loclen/quadrature.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <string>

namespace loclen::mc {

namespace {

using parallel::Welford;

std::size_t grid_count(double length, double delta, const char* who) {
    detail::require(delta > 0.0 && std::isfinite(delta), std::string(who) + ": delta must be positive");
    detail::require(length > 0.0 && std::isfinite(length), std::string(who) + ": length must be positive");
    const double q = length / delta;
    const double r = std::round(q);
    detail::require(r >= 1.0 && std::abs(q - r) <= 1e-9 * r, std::string(who) + ": delta must divide the length");
    return static_cast<std::size_t>(r);
}

std::size_t grid_shift(double x, double delta, const char* who) {
    const double q = std::abs(x) / delta;
    const double r = std::round(q);
    detail::require(std::abs(q - r) <= 1e-9 * std::max(1.0, r),
                    std::string(who) + ": x must be a multiple of delta");
    return static_cast<std::size_t>(r);
}

CurveEstimate finish(const std::vector<double>& xs, const Welford& w, double delta) {
    CurveEstimate out;
    out.xs = xs;
    out.n_samples = w.count;
    out.grid_step = delta;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        out.values.push_back(w.mean[i]);
        const double se = w.std_error(i);
        out.std_errors.push_back(se);
        out.unreliable.push_back(!(se <= 0.5 * std::abs(w.mean[i])));
    }
    return out;
}

// Runs per_sample(rng, obs) for n samples and returns merged statistics.
template <class Make, class PerSample>
Welford run(std::uint64_t n, std::size_t dim, Seed seed, RunOptions opt, Make make_workspace,
            PerSample per_sample) {
    const std::uint64_t chunks = std::min<std::uint64_t>(parallel::kDefaultChunks, std::max<std::uint64_t>(1, n));
    std::vector<Welford> parts(chunks, Welford(dim));
    parallel::for_chunks(n, chunks, opt.threads, [&](std::uint64_t c, std::uint64_t b, std::uint64_t e) {
        auto ws = make_workspace();
        std::vector<double> obs(dim);
        for (std::uint64_t i = b; i < e; ++i) {
            Rng rng(seed.child(i));
            per_sample(rng, obs, ws);
            parts[c].add(obs);
        }
    });
    Welford total(dim);
    for (const auto& p : parts) total.merge(p);
    return total;
}

// Two-sided Bessel-3 on [-M, M] as e^{-B} normalized by the trapezoid rule.
// Index N is the origin.
void two_sided_rho(Rng& rng, double M, std::size_t N, std::vector<double>& right, std::vector<double>& left,
                   std::vector<double>& rho) {
    paths::fill_bessel3(rng, M, N + 1, right);
    paths::fill_bessel3(rng, M, N + 1, left);
    rho.resize(2 * N + 1);
    for (std::size_t k = 0; k <= N; ++k) {
        rho[N + k] = std::exp(-right[k]);
        rho[N - k] = std::exp(-left[k]);
    }
    quad::CompensatedSum<double> z;
    for (double v : rho) z.add(v);
    const double delta = M / static_cast<double>(N);
    const double mass = (z.value() - 0.5 * (rho.front() + rho.back())) * delta;
    const double inv = 1.0 / mass;
    for (double& v : rho) v *= inv;
}

double trapezoid_correlation(const std::vector<double>& rho, std::size_t s, double delta) {
    const std::size_t len = rho.size();
    if (s >= len) return 0.0;
    const std::size_t m = len - s;
    double sum = 0.0;
    for (std::size_t k = 0; k < m; ++k) sum += rho[k] * rho[k + s];
    sum -= 0.5 * (rho[0] * rho[s] + rho[m - 1] * rho[m - 1 + s]);
    if (m == 1) sum = 0.0;
    return sum * delta;
}

std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftPlan {
    int size = 0;
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
    double* real = nullptr;
    fftw_complex* spectrum = nullptr;

    explicit FftPlan(int n) : size(n) {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        real = fftw_alloc_real(n);
        spectrum = fftw_alloc_complex(n / 2 + 1);
        forward = fftw_plan_dft_r2c_1d(n, real, spectrum, FFTW_ESTIMATE);
        backward = fftw_plan_dft_c2r_1d(n, spectrum, real, FFTW_ESTIMATE);
    }
    ~FftPlan() {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        fftw_destroy_plan(forward);
        fftw_destroy_plan(backward);
        fftw_free(real);
        fftw_free(spectrum);
    }
    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;
};

}  // namespace

std::vector<double> rho_from_bridge(const std::vector<double>& bridge, double delta) {
    detail::require(bridge.size() >= 2, "rho_from_bridge: need at least 2 points");
    const std::size_t N = bridge.size() - 1;
    const double top = *std::max_element(bridge.begin(), bridge.begin() + static_cast<std::ptrdiff_t>(N));
    std::vector<double> rho(N);
    quad::CompensatedSum<double> z;
    for (std::size_t k = 0; k < N; ++k) {
        rho[k] = std::exp(bridge[k] - top);
        z.add(rho[k]);
    }
    const double inv = 1.0 / (z.value() * delta);
    for (double& v : rho) v *= inv;
    return rho;
}

CurveEstimate mc_rho_L_covariance(double L, const std::vector<double>& xs, std::uint64_t n, double delta,
                                  Seed seed, RunOptions opt) {
    detail::require(n >= 1, "mc_rho_L_covariance: n must be >= 1");
    detail::require(!xs.empty(), "mc_rho_L_covariance: empty x grid");
    const std::size_t N = grid_count(L, delta, "mc_rho_L_covariance");
    std::vector<std::size_t> shifts;
    for (double x : xs) {
        detail::require(x >= 0.0 && x < L, "mc_rho_L_covariance: x must lie in [0, L)");
        shifts.push_back(grid_shift(x, delta, "mc_rho_L_covariance"));
    }
    struct Ws {
        std::vector<double> path;
    };
    const Welford w = run(
        n, xs.size(), seed, opt, [] { return Ws{}; },
        [&](Rng& rng, std::vector<double>& obs, Ws& ws) {
            paths::fill_brownian_bridge(rng, L, N + 1, ws.path);
            const std::vector<double> rho = rho_from_bridge(ws.path, delta);
            for (std::size_t j = 0; j < shifts.size(); ++j) {
                const std::size_t s = shifts[j] % N;
                double sum = 0.0;
                for (std::size_t k = 0; k < N; ++k) sum += rho[k] * rho[(k + s) % N];
                obs[j] = sum * delta;
            }
        });
    return finish(xs, w, delta);
}

CurveEstimate mc_g_infinity(const std::vector<double>& xs, double M, std::uint64_t n, double delta, Seed seed,
                            RunOptions opt) {
    detail::require(n >= 1, "mc_g_infinity: n must be >= 1");
    detail::require(!xs.empty(), "mc_g_infinity: empty x grid");
    const std::size_t N = grid_count(M, delta, "mc_g_infinity");
    std::vector<std::size_t> shifts;
    for (double x : xs) {
        detail::require(std::abs(x) <= 0.5 * M, "mc_g_infinity: |x| must not exceed M/2");
        shifts.push_back(grid_shift(x, delta, "mc_g_infinity"));
    }
    struct Ws {
        std::vector<double> right, left, rho;
    };
    const Welford w = run(
        n, xs.size(), seed, opt, [] { return Ws{}; },
        [&](Rng& rng, std::vector<double>& obs, Ws& ws) {
            two_sided_rho(rng, M, N, ws.right, ws.left, ws.rho);
            for (std::size_t j = 0; j < shifts.size(); ++j) obs[j] = trapezoid_correlation(ws.rho, shifts[j], delta);
        });
    return finish(xs, w, delta);
}

ModeProfile mc_mode_profile(double L, double M, std::uint64_t n, double delta, Seed seed, double M_inf,
                            RunOptions opt) {
    detail::require(n >= 1, "mc_mode_profile: n must be >= 1");
    detail::require(M > 0.0 && M <= 0.5 * L, "mc_mode_profile: need 0 < M <= L/2");
    detail::require(M_inf >= M, "mc_mode_profile: M_inf must be >= M");
    const std::size_t N = grid_count(L, delta, "mc_mode_profile");
    const std::size_t K = grid_shift(M, delta, "mc_mode_profile");
    const std::size_t Ninf = grid_count(M_inf, delta, "mc_mode_profile");
    std::vector<double> xs;
    for (std::size_t i = 0; i <= 2 * K; ++i) xs.push_back((static_cast<double>(i) - static_cast<double>(K)) * delta);
    const std::size_t dim = xs.size();

    struct Ws {
        std::vector<double> path;
    };
    const Welford wb = run(
        n, dim, seed.child(0), opt, [] { return Ws{}; },
        [&](Rng& rng, std::vector<double>& obs, Ws& ws) {
            paths::fill_brownian_bridge(rng, L, N + 1, ws.path);
            const std::vector<double> rho = rho_from_bridge(ws.path, delta);
            const std::size_t m = static_cast<std::size_t>(std::max_element(rho.begin(), rho.end()) - rho.begin());
            for (std::size_t i = 0; i < dim; ++i) obs[i] = rho[(m + N + i - K) % N];
        });

    // Two-sided Bessel-3 seen at y = (j + u) delta, j in Z, u uniform on [0,1).
    struct WsInf {
        std::vector<double> tr, tl, right, left, rho;
    };
    const Welford wl = run(
        n, dim, seed.child(1), opt, [] { return WsInf{}; },
        [&](Rng& rng, std::vector<double>& obs, WsInf& ws) {
            const double u = rng.uniform();
            ws.tr.resize(Ninf);
            ws.tl.resize(Ninf);
            for (std::size_t j = 0; j < Ninf; ++j) {
                ws.tr[j] = (static_cast<double>(j) + u) * delta;
                ws.tl[j] = (static_cast<double>(j) + 1.0 - u) * delta;
            }
            paths::fill_bessel3_at(rng, ws.tr, ws.right);
            paths::fill_bessel3_at(rng, ws.tl, ws.left);
            // grid index Ninf - 1 - j holds left[j]; index Ninf + j holds right[j]
            const std::size_t len = 2 * Ninf;
            ws.rho.resize(len);
            for (std::size_t j = 0; j < Ninf; ++j) {
                ws.rho[Ninf + j] = std::exp(-ws.right[j]);
                ws.rho[Ninf - 1 - j] = std::exp(-ws.left[j]);
            }
            quad::CompensatedSum<double> z;
            for (double v : ws.rho) z.add(v);
            const double mass = (z.value() - 0.5 * (ws.rho.front() + ws.rho.back())) * delta;
            const std::size_t m =
                static_cast<std::size_t>(std::max_element(ws.rho.begin(), ws.rho.end()) - ws.rho.begin());
            for (std::size_t i = 0; i < dim; ++i) {
                const std::ptrdiff_t idx = static_cast<std::ptrdiff_t>(m + i) - static_cast<std::ptrdiff_t>(K);
                obs[i] = (idx >= 0 && idx < static_cast<std::ptrdiff_t>(len)) ? ws.rho[idx] / mass : 0.0;
            }
        });
    ModeProfile out{finish(xs, wb, delta), finish(xs, wl, delta)};
    return out;
}

double Histogram::mass() const {
    std::uint64_t total = below + above;
    for (auto c : counts) total += c;
    return curve.n_samples == 0 ? 0.0 : static_cast<double>(total) / static_cast<double>(curve.n_samples);
}

std::vector<double> sample_exp_functional(double t, double x, double c, std::uint64_t n, double delta, Seed seed,
                                          RunOptions opt) {
    detail::require(std::isfinite(x) && std::isfinite(c), "sample_exp_functional: x and c must be finite");
    const std::size_t N = grid_count(t, delta, "sample_exp_functional");
    std::vector<double> out(n);
    parallel::for_chunks(n, parallel::kDefaultChunks, opt.threads, [&](std::uint64_t, std::uint64_t b, std::uint64_t e) {
        std::vector<double> path;
        for (std::uint64_t i = b; i < e; ++i) {
            Rng rng(seed.child(i));
            paths::fill_brownian_bridge(rng, t, N + 1, path);
            double sum = 0.0;
            for (std::size_t k = 0; k <= N; ++k) {
                const double wk = path[k] + x * static_cast<double>(k) / static_cast<double>(N);
                const double v = std::exp(c * wk);
                sum += (k == 0 || k == N) ? 0.5 * v : v;
            }
            out[i] = sum * delta;
        }
    });
    return out;
}

Histogram oracle_a_density(double t, double x, Bins bins, std::uint64_t n, double delta, Seed seed, double c,
                           RunOptions opt) {
    detail::require(n >= 10000, "oracle_a_density: n must be >= 1e4");
    detail::require(bins.count >= 1 && bins.hi > bins.lo && std::isfinite(bins.lo) && std::isfinite(bins.hi),
                    "oracle_a_density: degenerate bins");
    const std::vector<double> samples = sample_exp_functional(t, x, c, n, delta, seed, opt);
    Histogram h;
    const double width = (bins.hi - bins.lo) / bins.count;
    for (int i = 0; i <= bins.count; ++i) h.edges.push_back(bins.lo + i * width);
    h.counts.assign(bins.count, 0);
    h.min_functional = samples.empty() ? 0.0 : *std::min_element(samples.begin(), samples.end());
    for (double s : samples) {
        if (s < bins.lo) {
            ++h.below;
        } else if (s >= bins.hi) {
            ++h.above;
        } else {
            const int b = std::min(bins.count - 1, static_cast<int>((s - bins.lo) / width));
            ++h.counts[b];
        }
    }
    h.curve.n_samples = n;
    h.curve.grid_step = delta;
    const double nd = static_cast<double>(n);
    for (int i = 0; i < bins.count; ++i) {
        const double p = static_cast<double>(h.counts[i]) / nd;
        h.curve.xs.push_back(0.5 * (h.edges[i] + h.edges[i + 1]));
        h.curve.values.push_back(p / width);
        const double se = std::sqrt(p * (1.0 - p) / nd) / width;
        h.curve.std_errors.push_back(se);
        h.curve.unreliable.push_back(!(se <= 0.5 * p / width));
    }
    return h;
}

TailFitResult fit_tail(const CurveEstimate& curve, std::pair<double, double> window) {
    detail::require(window.first < window.second, "fit_tail: window must satisfy x_lo < x_hi");
    detail::require(curve.xs.size() == curve.values.size(), "fit_tail: xs and values differ in length");
    std::vector<double> lx, ly, sig;
    for (std::size_t i = 0; i < curve.xs.size(); ++i) {
        const double x = curve.xs[i], v = curve.values[i];
        if (x < window.first || x > window.second || !(x > 0.0) || !(v > 0.0)) continue;
        lx.push_back(std::log(x));
        ly.push_back(std::log(v));
        const double se = i < curve.std_errors.size() ? curve.std_errors[i] : 0.0;
        sig.push_back(se / v);
    }
    detail::require(lx.size() >= 4, "fit_tail: fewer than 4 usable points in window");
    const bool weighted = std::all_of(sig.begin(), sig.end(), [](double s) { return s > 0.0 && std::isfinite(s); });
    const std::size_t m = lx.size();
    double sw = 0, sx = 0, sy = 0;
    std::vector<double> w(m);
    for (std::size_t i = 0; i < m; ++i) {
        w[i] = weighted ? 1.0 / (sig[i] * sig[i]) : 1.0;
        sw += w[i];
        sx += w[i] * lx[i];
        sy += w[i] * ly[i];
    }
    const double mx = sx / sw, my = sy / sw;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const double dx = lx[i] - mx, dy = ly[i] - my;
        sxx += w[i] * dx * dx;
        sxy += w[i] * dx * dy;
        syy += w[i] * dy * dy;
    }
    detail::require(sxx > 0.0, "fit_tail: all x in the window coincide");
    TailFitResult r;
    r.exponent = sxy / sxx;
    const double intercept = my - r.exponent * mx;
    r.amplitude = std::exp(intercept);
    double rss = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double res = ly[i] - intercept - r.exponent * lx[i];
        rss += w[i] * res * res;
    }
    const double s2 = rss / static_cast<double>(m - 2);
    r.exponent_stderr = std::sqrt(s2 / sxx);
    r.amplitude_stderr = r.amplitude * std::sqrt(s2 * (1.0 / sw + mx * mx / sxx));
    r.r_squared = syy > 0.0 ? std::clamp(1.0 - rss / syy, 0.0, 1.0) : 1.0;
    r.x_lo = window.first;
    r.x_hi = window.second;
    r.points = static_cast<int>(m);
    return r;
}

MomentEstimate mc_quenched_moment(double p, double M, std::uint64_t n, double delta, Seed seed, RunOptions opt) {
    detail::require(p >= 0.0 && p <= 8.0, "mc_quenched_moment: need 0 <= p <= 8");
    detail::require(M >= 64.0, "mc_quenched_moment: need M >= 64");
    detail::require(n >= 1, "mc_quenched_moment: n must be >= 1");
    const std::size_t N = grid_count(M, delta, "mc_quenched_moment");
    const std::size_t len = 2 * N + 1;
    int fft_n = 1;
    while (static_cast<std::size_t>(fft_n) < 2 * len) fft_n *= 2;
    std::vector<double> moments(n);
    std::vector<double> lag_weight(len);
    for (std::size_t s = 0; s < len; ++s)
        lag_weight[s] = (p == 0.0) ? 1.0 : std::pow(static_cast<double>(s) * delta, p);

    parallel::for_chunks(n, parallel::kDefaultChunks, opt.threads, [&](std::uint64_t, std::uint64_t b, std::uint64_t e) {
        FftPlan plan(fft_n);
        std::vector<double> right, left, rho;
        for (std::uint64_t i = b; i < e; ++i) {
            Rng rng(seed.child(i));
            two_sided_rho(rng, M, N, right, left, rho);
            std::fill(plan.real, plan.real + fft_n, 0.0);
            std::copy(rho.begin(), rho.end(), plan.real);
            fftw_execute_dft_r2c(plan.forward, plan.real, plan.spectrum);
            for (int k = 0; k <= fft_n / 2; ++k) {
                const double re = plan.spectrum[k][0], im = plan.spectrum[k][1];
                plan.spectrum[k][0] = re * re + im * im;
                plan.spectrum[k][1] = 0.0;
            }
            fftw_execute_dft_c2r(plan.backward, plan.spectrum, plan.real);
            // plan.real[s] = fft_n * sum_k rho_k rho_{k+s}; lags +-s are equal
            double num = lag_weight[0] * plan.real[0], den = plan.real[0];
            for (std::size_t s = 1; s < len; ++s) {
                const double c = std::max(0.0, plan.real[s]);
                num += 2.0 * lag_weight[s] * c;
                den += 2.0 * c;
            }
            moments[i] = (p == 0.0) ? 1.0 : num / den;
        }
    });

    MomentEstimate out;
    std::vector<double> sorted = moments;
    std::sort(sorted.begin(), sorted.end());
    auto quantile = [&](double q) {
        const double pos = q * static_cast<double>(sorted.size() - 1);
        const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
        const std::size_t hi = std::min(sorted.size() - 1, lo + 1);
        return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
    };
    const double median = quantile(0.5);
    out.q25 = quantile(0.25);
    out.q75 = quantile(0.75);
    Welford w(1);
    for (double v : moments) w.add({v});
    out.mean = w.mean[0];
    out.mean_se = w.std_error(0);
    out.curve.xs = {p};
    out.curve.values = {median};
    const double nd = static_cast<double>(n);
    out.curve.std_errors = {1.2533 * (out.q75 - out.q25) / 1.349 / std::sqrt(nd)};
    out.curve.n_samples = n;
    out.curve.grid_step = delta;
    out.curve.unreliable = {!(out.curve.std_errors[0] <= 0.5 * std::abs(median))};
    return out;
}

}  // namespace loclen::mc
