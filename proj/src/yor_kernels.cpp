#include "loclen/yor_kernels.hpp"

#include "loclen/error.hpp"
#include "loclen/quadrature.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace loclen::kernels {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(sinh(u)/u) and its derivative coth(u) - 1/u, u >= 0.
double log_sinhc(double u) {
    if (u < 0.1) {
        const double u2 = u * u;
        return u2 * (1.0 / 6 + u2 * (-1.0 / 180 + u2 * (1.0 / 2835 - u2 / 37800)));
    }
    return u - std::log(2.0) + std::log1p(-std::exp(-2.0 * u)) - std::log(u);
}

double dlog_sinhc(double u) {
    if (u < 0.1) {
        const double u2 = u * u;
        return u * (1.0 / 3 + u2 * (-1.0 / 45 + u2 * (2.0 / 945 - u2 / 4725)));
    }
    return 1.0 / std::tanh(u) - 1.0 / u;
}

// k(s) = log(s / sin s) on [0, pi) and k'(s) = 1/s - cot s.
double log_s_over_sin(double s) {
    if (s < 0.1) {
        const double s2 = s * s;
        return s2 * (1.0 / 6 + s2 * (1.0 / 180 + s2 * (1.0 / 2835 + s2 / 37800)));
    }
    return std::log(s) - std::log(std::sin(s));
}

double dlog_s_over_sin(double s) {
    if (s < 0.1) {
        const double s2 = s * s;
        return s * (1.0 / 3 + s2 * (1.0 / 45 + s2 * (2.0 / 945 + s2 / 4725)));
    }
    return 1.0 / s - std::cos(s) / std::sin(s);
}

// A point on the steepest-descent contour w = u + i(pi - s). Near s = pi the
// complement v = pi - s is carried separately so sin s keeps full precision.
struct ContourPoint {
    double s = 0.0;
    double sin_s = 0.0;
    double cos_s = 1.0;
    double dk = 0.0;  // k'(s)
};

// Solves log(s / sin s) = ell for s in [0, pi).
ContourPoint solve_contour(double ell) {
    ContourPoint p;
    if (!(ell > 0.0)) {
        p.s = 0.0;
        p.sin_s = 0.0;
        p.cos_s = 1.0;
        p.dk = 0.0;
        return p;
    }
    const double ell_half = std::log(kPi / 2);
    if (ell <= ell_half) {
        // k is increasing and convex on [0, pi/2]; Newton from the right
        // of the root converges monotonically.
        double s = std::min(std::sqrt(6.0 * ell), kPi / 2);
        for (int it = 0; it < 60; ++it) {
            const double f = log_s_over_sin(s) - ell;
            const double step = f / dlog_s_over_sin(s);
            s -= step;
            if (s < 0) s = 0.5 * (s + step);
            if (std::abs(step) <= 4 * kEps * s) break;
        }
        p.s = s;
        p.sin_s = std::sin(s);
        p.cos_s = std::cos(s);
        p.dk = dlog_s_over_sin(s);
        return p;
    }
    // v = pi - s in (0, pi/2): solve log(pi - v) - log(sin v) = ell in lv = log v.
    double lv = ell < 700 ? std::log(kPi / (std::exp(ell) + 1.0)) : std::log(kPi) - ell;
    double lo = -std::numeric_limits<double>::max();
    double hi = std::log(kPi / 2);
    for (int it = 0; it < 100; ++it) {
        const double v = std::exp(lv);
        const double f = std::log(kPi - v) - std::log(std::sin(v)) - ell;
        if (f > 0)
            lo = lv;  // f decreasing in v
        else
            hi = lv;
        const double df = -v / (kPi - v) - v * std::cos(v) / std::sin(v);
        double next = lv - f / df;
        if (!(next > lo && next < hi)) next = (lo > -1e300) ? 0.5 * (lo + hi) : hi - 1.0;
        if (std::abs(next - lv) <= 4 * kEps * std::max(1.0, std::abs(lv))) {
            lv = next;
            break;
        }
        lv = next;
    }
    const double v = std::exp(lv);
    p.s = kPi - v;
    p.sin_s = std::sin(v);
    p.cos_s = -std::cos(v);
    p.dk = 1.0 / (kPi - v) + std::cos(v) / std::sin(v);
    return p;
}

// Largest u0 >= 0 with log(r t) + log(sinh u0 / u0) = 0 when r t < 1.
double saddle_u0(double log_rt) {
    if (log_rt >= 0.0) return 0.0;
    const double target = -log_rt;
    double u = target < 1.0 ? std::sqrt(6.0 * target) : target + std::log(2.0 * target) + 0.5;
    double lo = 0.0, hi = std::max(2.0 * u, target + 50.0);
    for (int it = 0; it < 200; ++it) {
        const double f = log_sinhc(u) - target;
        if (f > 0)
            hi = u;
        else
            lo = u;
        double next = u - f / dlog_sinhc(u);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - u) <= 4 * kEps * std::max(1.0, u)) {
            u = next;
            break;
        }
        u = next;
    }
    return u;
}

LogValue log_theta_steepest(double log_r, double t, const QuadratureConfig& cfg) {
    const double r = std::exp(log_r);
    const double log_rt = log_r + std::log(t);
    const double u0 = saddle_u0(log_rt);
    const double ell0 = log_sinhc(u0);

    struct Eval {
        double phi;   // real part of the exponent (imaginary part is zero)
        double mult;  // Im[sinh(w) dw/dtau]
    };
    auto eval = [&](double tau) -> Eval {
        const double u = u0 + tau * tau;
        const double ell = u0 > 0.0 ? log_sinhc(u) - ell0 : log_rt + log_sinhc(u);
        const ContourPoint p = solve_contour(ell);
        const double phi = -(u * u - p.s * p.s) / (2.0 * t) + r * std::cosh(u) * p.cos_s;
        double ds_dtau;
        if (p.dk > 0.0) {
            ds_dtau = 2.0 * tau * dlog_sinhc(u) / p.dk;
        } else {
            // contour start at a saddle on Im w = pi: s ~ tau sqrt(6 ell'(u0))
            ds_dtau = std::sqrt(6.0 * dlog_sinhc(u));
        }
        const double mult = 2.0 * tau * std::cosh(u) * p.sin_s + ds_dtau * std::sinh(u) * p.cos_s;
        return {phi, mult};
    };

    const double phi0 = eval(0.0).phi;

    // Bracket the support of the integrand on the contour.
    double tau_max = 1e-4 * std::min(1.0, std::sqrt(t));
    double log_peak = kNegInf;
    for (int it = 0; it < 400; ++it) {
        const Eval e = eval(tau_max);
        const double lg = e.phi - phi0 + std::log(std::abs(e.mult) + 1e-300);
        log_peak = std::max(log_peak, lg);
        const double u = u0 + tau_max * tau_max;
        if ((lg < log_peak - 46.0 && e.phi < phi0 - 46.0) || u > 700.0) break;
        tau_max *= 1.25;
    }

    auto integrand = [&](double tau) {
        if (u0 + tau * tau > 700.0) return 0.0;
        const Eval e = eval(tau);
        return std::exp(e.phi - phi0) * e.mult;
    };
    const double tol = std::max(0.1 * cfg.rel_tol, 1e-13);
    const quad::Result res = quad::integrate(integrand, 0.0, tau_max, 0.0, tol, cfg.max_subdivisions);
    if (!(res.value > 0.0)) {
        LogValue out;
        out.log_value = kNegInf;
        out.rel_error = std::numeric_limits<double>::infinity();
        out.precision_loss = true;
        return out;
    }
    LogValue out;
    const double log_pref = log_r - 0.5 * std::log(2.0 * kPi * kPi * kPi * t);
    out.log_value = log_pref + phi0 + std::log(res.value);
    const double cond = res.l1 / res.value;
    out.rel_error = res.abs_error / res.value + 8.0 * kEps * cond +
                    4.0 * kEps * (std::abs(phi0) + std::abs(log_pref));
    out.precision_loss = cond > 1e4 || !res.converged;
    return out;
}

// Panel truncation point: where the folded integrand drops below
// abs_tol * e^-margin.
double panel_w_max(double r, double t, const QuadratureConfig& cfg) {
    const double log_pref = std::log(r) - 0.5 * std::log(2.0 * kPi * kPi * kPi * t);
    const double shift = kPi * kPi / (2.0 * t);
    auto log_env = [&](double w) { return shift - w * w / (2.0 * t) - r * std::cosh(w) + w + log_pref; };
    const double cut = std::log(cfg.abs_tol) - cfg.w_max_margin;
    double w_max = 1.0;
    while (log_env(w_max) > cut && w_max < 700.0) w_max *= 1.25;
    return w_max;
}

KernelValue theta_panels(double r, double t, const QuadratureConfig& cfg) {
    const double log_pref = std::log(r) - 0.5 * std::log(2.0 * kPi * kPi * kPi * t);
    const double shift = kPi * kPi / (2.0 * t);
    const double w_max = panel_w_max(r, t, cfg);
    auto f = [&](double w) {
        const double e = shift - w * w / (2.0 * t) - r * std::cosh(w);
        return std::exp(e + log_pref) * std::sinh(w) * std::sin(kPi * w / t);
    };
    quad::CompensatedSum<double> sum;
    double abs_sum = 0, err = 0;
    int panels = 0;
    double a = 0.0;
    while (a < w_max) {
        const double b = (t >= w_max) ? w_max : std::min(w_max, a + t);
        const quad::Result res = quad::integrate(f, a, b, 0.25 * cfg.abs_tol, 0.1 * cfg.rel_tol, cfg.max_subdivisions);
        sum.add(res.value);
        abs_sum += std::abs(res.value);
        err += res.abs_error;
        a = b;
        if (++panels > 1000000) break;
    }
    KernelValue out;
    out.value = sum.value();
    const double cancel = abs_sum * kEps * 8.0;
    out.est_error = err + cancel + cfg.abs_tol;
    out.precision_loss = cancel > cfg.rel_tol * std::abs(out.value);
    return out;
}

// Same panels in 160-digit arithmetic. Each panel is half a period of the
// sine, integrated with 64-point Gauss-Legendre; the 48-point rule gives the
// error. Covers the e^{pi^2/(2t)} cancellation down to t = 0.02.
KernelValue theta_panels_extended(double r, double t, const QuadratureConfig& cfg) {
    using Real = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<160>,
                                               boost::multiprecision::et_off>;
    using boost::multiprecision::abs;
    const Real pi = boost::math::constants::pi<Real>();
    const Real rr = r, tt = t;
    const Real log_pref = log(rr) - log(2 * pi * pi * pi * tt) / 2;
    const Real shift = pi * pi / (2 * tt);
    auto f = [&](const Real& w) {
        const Real ew = exp(w);
        const Real iew = 1 / ew;
        const Real e = shift - w * w / (2 * tt) - rr * (ew + iew) / 2 + log_pref;
        return exp(e) * (ew - iew) / 2 * sin(pi * w / tt);
    };
    const double w_max = panel_w_max(r, t, cfg);
    Real sum = 0, abs_sum = 0, err = 0;
    int panels = 0;
    for (double a = 0.0; a < w_max && panels < 1000000; ++panels) {
        const double b = (t >= w_max) ? w_max : std::min(w_max, a + t);
        const Real fine = boost::math::quadrature::gauss<Real, 64>::integrate(f, Real(a), Real(b));
        const Real coarse = boost::math::quadrature::gauss<Real, 48>::integrate(f, Real(a), Real(b));
        sum += fine;
        abs_sum += abs(fine);
        err += abs(fine - coarse);
        a = b;
    }
    KernelValue out;
    out.value = static_cast<double>(sum);
    const double cancel = static_cast<double>(abs_sum) * 1e-155;
    out.est_error = static_cast<double>(err) + cancel + cfg.abs_tol + kEps * std::abs(out.value);
    out.precision_loss = static_cast<double>(err) + cancel > cfg.rel_tol * std::abs(out.value);
    return out;
}

void check_t(double t, const QuadratureConfig& cfg, const char* who) {
    if (!(t > 0.0)) throw InvalidArgument(std::string(who) + ": t must be positive");
    if (t < cfg.effective_min_t())
        throw DomainRestriction(std::string(who) + ": t=" + std::to_string(t) +
                                " below min_t=" + std::to_string(cfg.effective_min_t()));
}

}  // namespace

void QuadratureConfig::validate() const {
    detail::require(rel_tol > 0.0, "QuadratureConfig: rel_tol must be > 0");
    detail::require(abs_tol > 0.0, "QuadratureConfig: abs_tol must be > 0");
    detail::require(max_subdivisions >= 1, "QuadratureConfig: max_subdivisions must be >= 1");
    detail::require(min_t > 0.0, "QuadratureConfig: min_t must be > 0");
    detail::require(w_max_margin >= 0.0, "QuadratureConfig: w_max_margin must be >= 0");
    detail::require(bound_constant > 0.0, "QuadratureConfig: bound_constant must be > 0");
}

double QuadratureConfig::effective_min_t() const {
    if (theta_method == ThetaMethod::OscillatoryPanels) return std::max(min_t, extended_precision ? 0.02 : 0.1);
    return min_t;
}

KernelValue LogValue::to_value() const {
    KernelValue v;
    v.value = std::exp(log_value);
    v.est_error = std::isfinite(rel_error) ? v.value * rel_error : std::numeric_limits<double>::infinity();
    v.precision_loss = precision_loss;
    return v;
}

double heat_kernel(double t, double x) {
    detail::require(t > 0.0, "heat_kernel: t must be positive");
    return std::exp(-x * x / (2.0 * t)) / std::sqrt(2.0 * kPi * t);
}

LogValue log_theta(double log_r, double t, const QuadratureConfig& cfg) {
    cfg.validate();
    detail::require(std::isfinite(log_r), "theta: r must be positive and finite");
    check_t(t, cfg, "theta");
    if (cfg.theta_method == ThetaMethod::SteepestDescent) return log_theta_steepest(log_r, t, cfg);
    const KernelValue v = theta(std::exp(log_r), t, cfg);
    LogValue out;
    out.log_value = v.value > 0 ? std::log(v.value) : kNegInf;
    out.rel_error = v.value > 0 ? v.est_error / v.value : std::numeric_limits<double>::infinity();
    out.precision_loss = v.precision_loss || !(v.value > 0);
    return out;
}

KernelValue theta(double r, double t, const QuadratureConfig& cfg) {
    cfg.validate();
    detail::require(r > 0.0 && std::isfinite(r), "theta: r must be positive and finite");
    check_t(t, cfg, "theta");
    if (cfg.theta_method == ThetaMethod::SteepestDescent)
        return log_theta_steepest(std::log(r), t, cfg).to_value();
    return cfg.extended_precision ? theta_panels_extended(r, t, cfg) : theta_panels(r, t, cfg);
}

LogValue log_yor_density_a(double t, double log_y, double x, const QuadratureConfig& cfg) {
    detail::require(std::isfinite(log_y), "yor_density_a: y must be positive and finite");
    detail::require(std::isfinite(x), "yor_density_a: x must be finite");
    LogValue th = log_theta(x - log_y, t, cfg);
    const double inv_y = std::exp(-log_y);
    const double lead = 0.5 * std::log(2.0 * kPi * t) + x * x / (2.0 * t) - log_y -
                        0.5 * (1.0 + std::exp(2.0 * x)) * inv_y;
    th.rel_error += 4.0 * kEps * (std::abs(lead) + std::abs(th.log_value));
    th.log_value += lead;
    return th;
}

KernelValue yor_density_a(double t, double y, double x, const QuadratureConfig& cfg) {
    detail::require(y > 0.0, "yor_density_a: y must be positive");
    return log_yor_density_a(t, std::log(y), x, cfg).to_value();
}

KernelValue density_f_lambda(double lambda, double y, double x, const QuadratureConfig& cfg) {
    detail::require(lambda > 0.0, "density_f_lambda: lambda must be positive");
    detail::require(y > 0.0, "density_f_lambda: y must be positive");
    const double s = lambda * lambda / 4.0;
    KernelValue a = yor_density_a(s, s * y, lambda * x / 2.0, cfg);
    a.value *= s;
    a.est_error *= s;
    return a;
}

LogValue log_h_kernel(double log_y, double x, const QuadratureConfig& cfg) {
    cfg.validate();
    detail::require(std::isfinite(log_y), "h_kernel: y must be positive and finite");
    detail::require(std::isfinite(x), "h_kernel: x must be finite");
    // int_0^inf w e^{-r cosh w} sinh w dw = int_1^inf acosh(u) e^{-r u} du
    //   = e^{-r} r^{-1} int_0^inf acosh(1 + q^2/r) e^{-q^2} 2q dq.
    const double log_r = x - log_y;
    const double inv_r = std::exp(-log_r);
    auto f = [&](double q) {
        const double eps = q * q * inv_r;
        const double acosh1p = std::log1p(eps + std::sqrt(eps * (2.0 + eps)));
        return acosh1p * std::exp(-q * q) * 2.0 * q;
    };
    const double q_max = std::sqrt(46.0 + cfg.w_max_margin + std::max(0.0, std::log(1.0 + inv_r)));
    const double tol = std::max(0.1 * cfg.rel_tol, 1e-13);
    // Split at sqrt(r) where acosh(1+q^2/r) turns from linear to logarithmic.
    const double knee = std::min(q_max, std::sqrt(std::exp(log_r)));
    quad::Result lo = quad::integrate(f, 0.0, knee, 0.0, tol, cfg.max_subdivisions);
    quad::Result hi = quad::integrate(f, knee, q_max, 0.0, tol, cfg.max_subdivisions);
    const double integral = lo.value + hi.value;
    LogValue out;
    // h = y^-2 e^{x - (1+e^{2x})/(2y)} e^{-r} r^-1 J, with e^x/y = r.
    const double inv_y = std::exp(-log_y);
    const double lead = -2.0 * log_y + x - 0.5 * (1.0 + std::exp(2.0 * x)) * inv_y - std::exp(log_r) - log_r;
    out.log_value = lead + std::log(integral);
    out.rel_error = (lo.abs_error + hi.abs_error) / integral + 4.0 * kEps * (std::abs(lead) + 1.0);
    out.precision_loss = !(lo.converged && hi.converged);
    return out;
}

KernelValue h_kernel(double y, double x, const QuadratureConfig& cfg) {
    detail::require(y > 0.0, "h_kernel: y must be positive");
    return log_h_kernel(std::log(y), x, cfg).to_value();
}

KernelValue h_kernel_direct(double y, double x, const QuadratureConfig& cfg) {
    cfg.validate();
    detail::require(y > 0.0, "h_kernel_direct: y must be positive");
    const double r = std::exp(x) / y;
    // int_0^inf w e^{-r (cosh w - 1)} sinh w dw, scaled by e^{-r} afterwards.
    auto f = [&](double w) { return w * std::exp(-r * 2.0 * std::pow(std::sinh(0.5 * w), 2)) * std::sinh(w); };
    double w_max = 1.0;
    while (r * (std::cosh(w_max) - 1.0) - w_max - std::log(w_max) < 46.0 + cfg.w_max_margin && w_max < 700.0)
        w_max *= 1.25;
    const double knee = std::min(w_max, 1.0 / std::sqrt(r));
    quad::Result lo = quad::integrate(f, 0.0, knee, 0.0, 0.1 * cfg.rel_tol, cfg.max_subdivisions);
    quad::Result hi = quad::integrate(f, knee, w_max, 0.0, 0.1 * cfg.rel_tol, cfg.max_subdivisions);
    const double lead = -2.0 * std::log(y) + x - 0.5 * (1.0 + std::exp(2.0 * x)) / y - r;
    KernelValue out;
    out.value = std::exp(lead) * (lo.value + hi.value);
    out.est_error = std::exp(lead) * (lo.abs_error + hi.abs_error) + 4 * kEps * out.value * (std::abs(lead) + 1);
    out.precision_loss = !(lo.converged && hi.converged);
    return out;
}

double log_a_bound(double t, double log_y, double x, double C) {
    detail::require(t >= 1.0, "a_bound: envelope only holds for t >= 1");
    detail::require(C > 0.0, "a_bound: C must be positive");
    const double y = std::exp(log_y);
    const double bracket = 1.0 + y * std::exp(-x) * std::abs(x - log_y);
    return std::log(C) + x * x / (2.0 * t) - 2.0 * log_y + x - 0.5 * (1.0 + std::exp(2.0 * x)) / y +
           std::log(bracket);
}

double a_bound(double t, double y, double x, double C) {
    detail::require(y > 0.0, "a_bound: y must be positive");
    return std::exp(log_a_bound(t, std::log(y), x, C));
}

double calibrate_bound_constant(std::span<const double> ts, std::span<const double> ys,
                                std::span<const double> xs, const QuadratureConfig& cfg, double safety) {
    detail::require(safety >= 1.0, "calibrate_bound_constant: safety must be >= 1");
    double worst = kNegInf;
    for (double t : ts) {
        for (double y : ys) {
            for (double x : xs) {
                const LogValue a = log_yor_density_a(t, std::log(y), x, cfg);
                if (a.log_value < std::log(1e-300)) continue;
                const double ratio = std::log(t) + a.log_value - log_a_bound(t, std::log(y), x, 1.0);
                worst = std::max(worst, ratio);
            }
        }
    }
    detail::require(std::isfinite(worst), "calibrate_bound_constant: no admissible grid points");
    return safety * std::exp(worst);
}

}  // namespace loclen::kernels
