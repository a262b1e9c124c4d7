#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "homsim/types.hpp"

namespace homsim {

struct QuadratureOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-8;
    int max_subdivisions = 2000;
};

template <typename Value>
struct QuadratureResult {
    Value value{};
    double error_estimate = 0.0;
    int evaluations = 0;
    bool converged = false;
};

namespace detail {

// 15-point Kronrod rule with embedded 7-point Gauss rule (QUADPACK dqk15).
// The Gauss nodes are the odd-index Kronrod nodes plus the midpoint.
inline constexpr double kKronrodNodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
inline constexpr double kKronrodWeights[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
inline constexpr double kGaussWeights[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

template <typename Value, typename F>
void gk15(const F& f, double a, double b, Value& kronrod, double& err) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    Value fv[8];
    for (int i = 0; i < 7; ++i) {
        const double dx = half * kKronrodNodes[i];
        fv[i] = f(mid - dx) + f(mid + dx);
    }
    fv[7] = f(mid);
    Value resk{};
    for (int i = 0; i < 8; ++i) resk += kKronrodWeights[i] * fv[i];
    Value resg = kGaussWeights[3] * fv[7];
    for (int i = 1; i < 7; i += 2) resg += kGaussWeights[i / 2] * fv[i];
    kronrod = half * resk;
    err = std::abs(Complex(half * (resk - resg)));
}

}  // namespace detail

/// Adaptive Gauss-Kronrod integration of f over [a, b]. Value may be double
/// or std::complex<double>.
template <typename Value = double, typename F>
QuadratureResult<Value> integrate(const F& f, double a, double b,
                                  const QuadratureOptions& opt = {}) {
    struct Interval {
        double a, b, err;
        Value val;
    };
    QuadratureResult<Value> out;
    if (a == b) {
        out.converged = true;
        return out;
    }
    Value v0;
    double e0 = 0;
    detail::gk15<Value>(f, a, b, v0, e0);
    std::vector<Interval> heap{{a, b, e0, v0}};
    Value total = v0;
    double total_err = e0;
    int evals = 15;
    auto by_error = [](const Interval& x, const Interval& y) { return x.err < y.err; };
    int splits = 0;
    auto goal = [&] { return std::max(opt.abs_tol, opt.rel_tol * std::abs(Complex(total))); };
    while (splits < opt.max_subdivisions && total_err > goal()) {
        std::pop_heap(heap.begin(), heap.end(), by_error);
        const Interval cur = heap.back();
        heap.pop_back();
        const double mid = 0.5 * (cur.a + cur.b);
        Interval left{cur.a, mid, 0, {}};
        Interval right{mid, cur.b, 0, {}};
        detail::gk15<Value>(f, left.a, left.b, left.val, left.err);
        detail::gk15<Value>(f, right.a, right.b, right.val, right.err);
        evals += 30;
        total += left.val + right.val - cur.val;
        total_err += left.err + right.err - cur.err;
        heap.push_back(left);
        std::push_heap(heap.begin(), heap.end(), by_error);
        heap.push_back(right);
        std::push_heap(heap.begin(), heap.end(), by_error);
        ++splits;
    }
    out.value = total;
    out.error_estimate = total_err;
    out.evaluations = evals;
    out.converged = total_err <= goal();
    return out;
}

/// Integrate with known breakpoints (integrand kinks/steps); each segment is
/// handled by the adaptive rule independently.
template <typename Value = double, typename F>
QuadratureResult<Value> integrate_segmented(const F& f, double a, double b,
                                            std::vector<double> breakpoints,
                                            const QuadratureOptions& opt = {}) {
    breakpoints.push_back(a);
    breakpoints.push_back(b);
    std::sort(breakpoints.begin(), breakpoints.end());
    QuadratureResult<Value> out;
    out.converged = true;
    for (size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        const double lo = std::clamp(breakpoints[i], a, b);
        const double hi = std::clamp(breakpoints[i + 1], a, b);
        if (!(hi > lo)) continue;
        auto part = integrate<Value>(f, lo, hi, opt);
        out.value += part.value;
        out.error_estimate += part.error_estimate;
        out.evaluations += part.evaluations;
        out.converged = out.converged && part.converged;
    }
    return out;
}

/// Throwing wrapper used by the oracle paths.
template <typename Value = double, typename F>
Value integrate_or_throw(const F& f, double a, double b,
                         std::vector<double> breakpoints = {},
                         const QuadratureOptions& opt = {}) {
    auto r = integrate_segmented<Value>(f, a, b, std::move(breakpoints), opt);
    if (!r.converged)
        throw NumericError("quadrature did not converge: error estimate " +
                           std::to_string(r.error_estimate));
    return r.value;
}

}  // namespace homsim
