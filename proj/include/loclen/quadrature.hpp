#pragma once

// One-dimensional quadrature primitives shared by the kernel and cubature
// modules: compensated summation, a globally adaptive Gauss-Kronrod (10,21)
// driver and fixed Gauss-Legendre panels. Node tables come from Boost.Math;
// the subdivision strategy is ours so that tolerances, subdivision budgets
// and error composition follow the QuadratureConfig contract.

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

namespace loclen::quad {

/// Neumaier's variant of Kahan summation.
template <class Real = double>
class CompensatedSum {
public:
    void add(Real x) noexcept {
        Real t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    Real value() const noexcept { return sum_ + comp_; }

private:
    Real sum_ = 0;
    Real comp_ = 0;
};

struct Result {
    double value = 0.0;
    double abs_error = 0.0;
    double l1 = 0.0;  ///< integral of |f|; |value|/l1 measures cancellation
    int evaluations = 0;
    int subdivisions = 0;
    bool converged = false;
};

namespace detail {

struct Panel {
    double a, b, value, error, l1;
    bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel gk21(F& f, double a, double b) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 21>;
    using G = boost::math::quadrature::gauss<double, 10>;
    const auto& x = GK::abscissa();
    const auto& wk = GK::weights();
    const auto& wg = G::weights();
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double fc = f(c);
    double kron = fc * wk[0];
    double gauss = 0.0;
    double l1 = std::abs(fc) * wk[0];
    for (std::size_t i = 1; i < x.size(); ++i) {
        const double fp = f(c + h * x[i]);
        const double fm = f(c - h * x[i]);
        kron += (fp + fm) * wk[i];
        l1 += (std::abs(fp) + std::abs(fm)) * wk[i];
        if (i % 2 == 1) gauss += (fp + fm) * wg[i / 2];
    }
    return Panel{a, b, kron * h, std::abs((kron - gauss) * h), l1 * std::abs(h)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (10,21) on a finite interval. Stops when
/// the summed error estimate is below max(abs_tol, rel_tol*|value|) or the
/// subdivision budget is spent (converged=false in that case; the caller
/// decides whether that is fatal).
template <class F>
Result integrate(F&& f, double a, double b, double abs_tol, double rel_tol,
                 int max_subdivisions = 2000) {
    Result out;
    if (a == b) {
        out.converged = true;
        return out;
    }
    std::priority_queue<detail::Panel> heap;
    heap.push(detail::gk21(f, a, b));
    out.evaluations = 21;
    double total = heap.top().value;
    double err = heap.top().error;
    int splits = 0;
    while (err > std::max(abs_tol, rel_tol * std::abs(total)) && splits < max_subdivisions) {
        detail::Panel worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            heap.push(worst);
            break;  // interval exhausted at working precision
        }
        detail::Panel left = detail::gk21(f, worst.a, mid);
        detail::Panel right = detail::gk21(f, mid, worst.b);
        out.evaluations += 42;
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++splits;
    }
    CompensatedSum<double> v, e, l;
    while (!heap.empty()) {
        v.add(heap.top().value);
        e.add(heap.top().error);
        l.add(heap.top().l1);
        heap.pop();
    }
    out.value = v.value();
    out.abs_error = e.value();
    out.l1 = l.value();
    out.subdivisions = splits;
    out.converged = out.abs_error <= std::max(abs_tol, rel_tol * std::abs(out.value));
    return out;
}

/// Fixed N-point Gauss-Legendre rule on [a, b].
template <int N, class F>
double gauss_legendre(F&& f, double a, double b) {
    using G = boost::math::quadrature::gauss<double, N>;
    const auto& x = G::abscissa();
    const auto& w = G::weights();
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] == 0.0) {
            s += w[i] * f(c);
        } else {
            s += w[i] * (f(c + h * x[i]) + f(c - h * x[i]));
        }
    }
    return s * h;
}

/// Nodes and weights of the N-point Gauss-Legendre rule on [a, b], in
/// increasing node order.
template <int N>
void gauss_legendre_nodes(double a, double b, std::vector<double>& nodes,
                          std::vector<double>& weights) {
    using G = boost::math::quadrature::gauss<double, N>;
    const auto& x = G::abscissa();
    const auto& w = G::weights();
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < x.size(); ++i) {
        pts.emplace_back(c + h * x[i], w[i] * h);
        if (x[i] != 0.0) pts.emplace_back(c - h * x[i], w[i] * h);
    }
    std::sort(pts.begin(), pts.end());
    for (auto& [xi, wi] : pts) {
        nodes.push_back(xi);
        weights.push_back(wi);
    }
}

}  // namespace loclen::quad
