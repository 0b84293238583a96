#include "loclen/limiting_density.hpp"

#include "loclen/error.hpp"
#include "loclen/monte_carlo.hpp"
#include "loclen/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

namespace loclen::density {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
using LogFn = std::function<double(double)>;

double softplus(double a, double b) {
    const double m = std::max(a, b);
    return m + std::log1p(std::exp(-std::abs(a - b)));
}

// log of z*k(z) at z = e^zeta for one kernel, with a starting guess for its
// maximum and the natural step in zeta.
struct Kernel {
    LogFn log_zk;
    double guess;
    double step;
};

Kernel kernel_a(double t, double y, const kernels::QuadratureConfig& q, double zeta_step) {
    // log((e^{2y}-1)/(2y)): typical size of int_0^1 e^{2 s y} ds
    double lg;
    if (std::abs(y) < 1e-4)
        lg = y;
    else if (y > 0)
        lg = 2 * y + std::log1p(-std::exp(-2 * y)) - std::log(2 * y);
    else
        lg = std::log1p(-std::exp(2 * y)) - std::log(-2 * y);
    const double guess = t < 1.0 ? std::log(t) + lg : softplus(0.0, 2 * y) - std::log(4.0);
    return Kernel{[t, y, q](double z) { return z + kernels::log_yor_density_a(t, z, y, q).log_value; }, guess,
                  zeta_step * std::min(1.0, std::sqrt(t))};
}

Kernel kernel_h(double y, const kernels::QuadratureConfig& q, double zeta_step) {
    return Kernel{[y, q](double z) { return z + kernels::log_h_kernel(z, y, q).log_value; },
                  softplus(0.0, 2 * y) - std::log(4.0), zeta_step};
}

// Trapezoid nodes zeta_k = anchor + k*h, k in [kmin, kmax], at the fine step h.
struct NodeSet {
    double anchor = 0.0;
    double h = 0.0;
    int kmin = 0;
    std::vector<double> log_v;
    double peak = 0.0;

    double zeta(std::size_t i) const { return anchor + (kmin + static_cast<int>(i)) * h; }
};

// Mode of k(z) in zeta; z*k(z) itself may increase without bound (h grows
// like log z / z).
double locate_peak(const Kernel& k) {
    auto f = [&](double z) {
        const double v = k.log_zk(z) - z;
        return std::isnan(v) ? kNegInf : v;
    };
    double z = k.guess;
    double fz = f(z);
    double up = f(z + 1.0), dn = f(z - 1.0);
    const double dir = up >= dn ? 1.0 : -1.0;
    if (std::max(up, dn) > fz) {
        z += dir;
        fz = std::max(up, dn);
        for (int it = 0; it < 400; ++it) {
            const double fn = f(z + dir);
            if (!(fn > fz)) break;
            z += dir;
            fz = fn;
        }
    }
    // Golden section on [z-1, z+1] down to a fraction of the node step.
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = z - 1.0, b = z + 1.0;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > 0.5 * k.step) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

NodeSet build_nodes(const Kernel& k, double anchor, double other_peak, double drop,
                    const std::optional<std::pair<double, double>>& fixed) {
    NodeSet ns;
    ns.h = 0.5 * k.step;
    if (fixed) {
        ns.anchor = fixed->first;
        ns.kmin = 0;
        const int n = static_cast<int>(std::ceil((fixed->second - fixed->first) / ns.h));
        for (int i = 0; i <= n; ++i) ns.log_v.push_back(k.log_zk(ns.anchor + i * ns.h));
    } else {
        ns.anchor = anchor;
        // weight of a node against the other kernel concentrated at other_peak
        auto weight = [&](double z, double lv) { return lv - 2.0 * softplus(z, other_peak); };
        std::vector<double> right, left;
        double best = kNegInf;
        auto extend = [&](std::vector<double>& out, int dir) {
            int quiet = 0;
            for (int i = (dir > 0 ? 0 : 1); i < 100000; ++i) {
                const double z = anchor + dir * i * ns.h;
                double lv = k.log_zk(z);
                if (std::isnan(lv)) lv = kNegInf;
                out.push_back(lv);
                const double w = weight(z, lv);
                best = std::max(best, w);
                quiet = (w < best - drop) ? quiet + 1 : 0;
                if (quiet >= 3) break;
            }
        };
        extend(right, +1);
        extend(left, -1);
        ns.kmin = -static_cast<int>(left.size());
        ns.log_v.assign(left.rbegin(), left.rend());
        ns.log_v.insert(ns.log_v.end(), right.begin(), right.end());
    }
    ns.peak = kNegInf;
    for (double v : ns.log_v) ns.peak = std::max(ns.peak, v);
    if (!std::isfinite(ns.peak)) throw NumericDegeneracy("inner cubature: kernel vanished on its node set");
    return ns;
}

struct LogEstimate {
    double log_value;
    double rel_error;
};

// log int int (z1+z2)^-2 k1 k2 dz1 dz2 by the zeta trapezoid rule.
LogEstimate inner_integral(const Kernel& k1, const Kernel& k2, const CubatureConfig& cfg) {
    const double drop = cfg.w_max_margin;
    double p1 = 0.0, p2 = 0.0;
    if (!cfg.z_log_range) {
        p1 = locate_peak(k1);
        p2 = locate_peak(k2);
    }
    const NodeSet n1 = build_nodes(k1, p1, p2, drop, cfg.z_log_range);
    const NodeSet n2 = build_nodes(k2, p2, p1, drop, cfg.z_log_range);
    const double c = cfg.z_log_range ? 0.5 * (cfg.z_log_range->first + cfg.z_log_range->second) : 0.5 * (p1 + p2);

    auto prepare = [&](const NodeSet& ns, std::vector<double>& v, std::vector<double>& e, std::vector<char>& even) {
        for (std::size_t i = 0; i < ns.log_v.size(); ++i) {
            v.push_back(std::exp(ns.log_v[i] - ns.peak));
            e.push_back(std::exp(std::clamp(ns.zeta(i) - c, -300.0, 300.0)));
            even.push_back(((ns.kmin + static_cast<int>(i)) % 2) == 0);
        }
    };
    std::vector<double> v1, e1, v2, e2;
    std::vector<char> ev1, ev2;
    prepare(n1, v1, e1, ev1);
    prepare(n2, v2, e2, ev2);

    quad::CompensatedSum<double> fine, coarse;
    for (std::size_t i = 0; i < v1.size(); ++i) {
        if (v1[i] == 0.0) continue;
        double row = 0.0, row_even = 0.0;
        for (std::size_t j = 0; j < v2.size(); ++j) {
            const double s = e1[i] + e2[j];
            const double term = v2[j] / (s * s);
            row += term;
            if (ev2[j]) row_even += term;
        }
        fine.add(v1[i] * row);
        if (ev1[i]) coarse.add(v1[i] * row_even);
    }
    const double sf = fine.value() * n1.h * n2.h;
    const double sc = coarse.value() * 4.0 * n1.h * n2.h;
    if (!(sf > 0.0)) throw NumericDegeneracy("inner cubature: non-positive integral");
    LogEstimate out;
    out.log_value = std::log(sf) + n1.peak + n2.peak - 2.0 * c;
    out.rel_error = std::abs(sf - sc) / sf + 1e-14 * std::sqrt(static_cast<double>(v1.size() * v2.size()));
    return out;
}

// c * int w(y) J(y) dy with log w supplied; trapezoid in y with halving.
DensityPoint outer_integral(const std::function<double(double)>& log_weight,
                            const std::function<LogEstimate(double)>& inner, double y_guess, double sigma,
                            double log_const, const CubatureConfig& cfg) {
    double max_inner_err = 0.0;
    auto logf = [&](double y) {
        const double lw = log_weight(y);
        if (!std::isfinite(lw)) return kNegInf;
        const LogEstimate j = inner(y);
        max_inner_err = std::max(max_inner_err, j.rel_error);
        return lw + j.log_value;
    };
    double h = 0.5 * std::min(1.0, sigma);
    const double cap = cfg.y_window_sigmas * std::max(sigma, 1.0);

    // hill-climb on the lattice y_guess + k h
    double y0 = y_guess;
    double f0 = logf(y0);
    {
        const double fu = logf(y0 + h), fd = logf(y0 - h);
        const double dir = fu >= fd ? 1.0 : -1.0;
        if (std::max(fu, fd) > f0) {
            y0 += dir * h;
            f0 = std::max(fu, fd);
            for (int it = 0; it < 4000; ++it) {
                const double fn = logf(y0 + dir * h);
                if (!(fn > f0)) break;
                y0 += dir * h;
                f0 = fn;
            }
        }
    }
    // extend until the log-integrand has dropped by w_max_margin
    std::vector<double> right{f0}, left;
    double best = f0;
    double log_edge = kNegInf;  // largest edge value where the cap cut the window
    auto extend = [&](std::vector<double>& out, int dir) {
        int quiet = 0;
        for (int i = 1; i * h <= cap; ++i) {
            const double v = logf(y0 + dir * i * h);
            out.push_back(v);
            best = std::max(best, v);
            quiet = (v < best - cfg.w_max_margin) ? quiet + 1 : 0;
            if (quiet >= 3) return;
        }
        if (!out.empty()) log_edge = std::max(log_edge, out.back());
    };
    extend(right, +1);
    extend(left, -1);
    std::vector<double> lv(left.rbegin(), left.rend());
    lv.insert(lv.end(), right.begin(), right.end());
    double y_lo = y0 - static_cast<double>(left.size()) * h;

    auto trapezoid = [&](const std::vector<double>& vals, double step) {
        quad::CompensatedSum<double> s;
        for (double v : vals) s.add(std::exp(v - best));
        return s.value() * step;
    };
    double prev = trapezoid(lv, h);
    double err = std::numeric_limits<double>::infinity();
    double cur = prev;
    for (int level = 0; level < 6; ++level) {
        std::vector<double> refined;
        refined.reserve(2 * lv.size());
        for (std::size_t i = 0; i < lv.size(); ++i) {
            refined.push_back(lv[i]);
            if (i + 1 < lv.size()) refined.push_back(logf(y_lo + (i + 0.5) * h));
        }
        lv.swap(refined);
        h *= 0.5;
        cur = trapezoid(lv, h);
        err = std::abs(cur - prev);
        if (err <= 0.25 * cfg.outer_rel_tol * cur) break;
        prev = cur;
    }
    DensityPoint out;
    const double scale = std::exp(best + log_const);
    out.value = cur * scale;
    const double truncation = std::exp(log_edge - best) * std::max(sigma, 1.0);
    out.est_error = (err + max_inner_err * cur + truncation) * scale;
    if (err > cfg.outer_rel_tol * cur)
        throw ConvergenceError("outer cubature did not reach outer_rel_tol", out.value, out.est_error);
    return out;
}

double log_gauss_weight(double y, double var) {
    // log(e^{2y} G_var(2y))
    return 2.0 * y - 2.0 * y * y / var - 0.5 * std::log(2.0 * std::numbers::pi * var);
}

}  // namespace

void CubatureConfig::validate() const {
    kernels::QuadratureConfig::validate();
    detail::require(outer_rel_tol > 0.0, "CubatureConfig: outer_rel_tol must be > 0");
    detail::require(y_window_sigmas > 0.0, "CubatureConfig: y_window_sigmas must be > 0");
    detail::require(zeta_step > 0.0, "CubatureConfig: zeta_step must be > 0");
    if (z_log_range) detail::require(z_log_range->first < z_log_range->second, "CubatureConfig: zeta_min < zeta_max");
}

DensityPoint two_point_L(double L, double x, const CubatureConfig& cfg) {
    cfg.validate();
    detail::require(L > 0.0 && std::isfinite(L), "two_point_L: L must be positive");
    detail::require(x > 0.0 && x < L, "two_point_L: x must lie in (0, L)");
    const double t1 = x / 4.0, t2 = (L - x) / 4.0;
    if (std::min(t1, t2) < cfg.effective_min_t())
        throw DomainRestriction("two_point_L: min(x, L-x)/4 below min_t");
    const double var = x * (1.0 - x / L);
    auto inner = [&](double y) {
        return inner_integral(kernel_a(t1, y, cfg, cfg.zeta_step), kernel_a(t2, y, cfg, cfg.zeta_step), cfg);
    };
    DensityPoint p = outer_integral([&](double y) { return log_gauss_weight(y, var); }, inner, 0.0,
                                    0.5 * std::sqrt(var), std::log(1.0 / 8.0), cfg);
    p.x = x;
    return p;
}

DensityPoint g_infinity(double x, const CubatureConfig& cfg) {
    cfg.validate();
    detail::require(std::isfinite(x), "g_infinity: x must be finite");
    detail::require(x != 0.0, "g_infinity: x = 0 is outside the analytic formula");
    const double ax = std::abs(x);
    if (ax / 4.0 < cfg.effective_min_t()) {
        const mc::CurveEstimate ce = mc::mc_g_infinity({ax}, cfg.fallback_M, cfg.fallback_samples,
                                                       cfg.fallback_delta, cfg.fallback_seed);
        DensityPoint p;
        p.x = x;
        p.value = ce.values[0];
        p.est_error = ce.std_errors[0];
        p.method = Method::MonteCarloFallback;
        return p;
    }
    const double t = ax / 4.0;
    auto inner = [&](double y) {
        return inner_integral(kernel_a(t, y, cfg, cfg.zeta_step), kernel_h(y, cfg, cfg.zeta_step), cfg);
    };
    DensityPoint p = outer_integral([&](double y) { return log_gauss_weight(y, ax); }, inner, 0.0,
                                    0.5 * std::sqrt(ax), std::log(0.5), cfg);
    p.x = x;
    return p;
}

DensityPoint lambda_const(const CubatureConfig& cfg, bool swap_kernels) {
    cfg.validate();
    auto inner = [&](double y) {
        // the two kernels are identical; swap_kernels reverses the summation order
        const Kernel k = kernel_h(y, cfg, cfg.zeta_step);
        Kernel k2 = k;
        if (swap_kernels) k2.guess = k.guess + 0.5 * cfg.zeta_step;
        return swap_kernels ? inner_integral(k2, k, cfg) : inner_integral(k, k2, cfg);
    };
    DensityPoint p = outer_integral([](double y) { return 2.0 * y; }, inner, 0.0, 1.0,
                                    0.5 * std::log(2.0 / std::numbers::pi), cfg);
    p.x = 0.0;
    return p;
}

DensityPoint tail_ratio(double x, const CubatureConfig& cfg) {
    detail::require(x > 0.0, "tail_ratio: x must be positive");
    DensityPoint p = g_infinity(x, cfg);
    const double s = std::pow(x, 1.5);
    p.value *= s;
    p.est_error *= s;
    return p;
}

DensityPoint two_point_mass(double L, const CubatureConfig& cfg, int panels_per_side) {
    cfg.validate();
    detail::require(L > 0.0, "two_point_mass: L must be positive");
    detail::require(panels_per_side >= 1, "two_point_mass: panels_per_side must be >= 1");
    const double eps = 4.0 * cfg.effective_min_t();
    const double half = 0.5 * L;
    detail::require(eps < half, "two_point_mass: L too small for min_t");
    // geometric panel edges eps = e_0 < e_1 < ... < e_n = L/2
    std::vector<double> edges{eps};
    const double ratio = std::pow(half / eps, 1.0 / panels_per_side);
    for (int i = 1; i < panels_per_side; ++i) edges.push_back(eps * std::pow(ratio, i));
    edges.push_back(half);

    quad::CompensatedSum<double> sum;
    double err = 0.0;
    double inner_left = 0.0, inner_right = 0.0;
    std::vector<double> nodes, weights;
    for (int side = 0; side < 2; ++side) {
        for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
            nodes.clear();
            weights.clear();
            quad::gauss_legendre_nodes<10>(edges[p], edges[p + 1], nodes, weights);
            for (std::size_t i = 0; i < nodes.size(); ++i) {
                const double xi = side == 0 ? nodes[i] : L - nodes[i];
                const DensityPoint d = two_point_L(L, xi, cfg);
                sum.add(weights[i] * d.value);
                err += weights[i] * d.est_error;
                if (p == 0 && i == 0) (side == 0 ? inner_left : inner_right) = d.value;
            }
        }
    }
    sum.add(eps * (inner_left + inner_right));
    DensityPoint out;
    out.x = L;
    out.value = sum.value();
    out.est_error = err + eps * (inner_left + inner_right);
    return out;
}

}  // namespace loclen::density
