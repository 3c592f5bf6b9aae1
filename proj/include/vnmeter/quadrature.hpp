#pragma once

// Globally adaptive Gauss-Kronrod (10/21) quadrature.
//
// The interval with the largest error estimate is bisected until the summed
// estimate meets max(abs_tol, rel_tol * |result|). Node sets and the
// bisection order are fixed, so results are reproducible bit-for-bit.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <queue>
#include <span>
#include <vector>

namespace vnmeter::quad {

struct Result {
    double value = 0.0;
    double error = 0.0;
    std::size_t evaluations = 0;
    bool converged = true;
};

namespace detail {

inline constexpr double kXgk[11] = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};

inline constexpr double kWgk[11] = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208034521784, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};

// Gauss weights for the odd Kronrod nodes kXgk[1], kXgk[3], ..., kXgk[9].
inline constexpr double kWg[5] = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Segment {
    double a;
    double b;
    double value;
    double error;

    bool operator<(const Segment& other) const {
        if (error != other.error) return error < other.error;
        return a > other.a;
    }
};

template <class F>
Segment gk21(F& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double kronrod = kWgk[10] * fc;
    double gauss = 0.0;
    for (int i = 0; i < 10; ++i) {
        const double dx = half * kXgk[i];
        const double pair = f(center - dx) + f(center + dx);
        kronrod += kWgk[i] * pair;
        if (i % 2 == 1) gauss += kWg[i / 2] * pair;
    }
    kronrod *= half;
    gauss *= half;
    return Segment{a, b, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace detail

template <class F>
Result integrate(F&& f, double a, double b, double abs_tol, double rel_tol,
                 std::size_t max_segments = 4000) {
    if (a == b) return {};
    std::priority_queue<detail::Segment> heap;
    auto first = detail::gk21(f, a, b);
    Result r{first.value, first.error, 21, true};
    heap.push(first);
    while (r.error > std::max(abs_tol, rel_tol * std::abs(r.value))) {
        if (heap.size() >= max_segments) {
            r.converged = false;
            break;
        }
        const auto worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        const auto left = detail::gk21(f, worst.a, mid);
        const auto right = detail::gk21(f, mid, worst.b);
        r.evaluations += 42;
        heap.push(left);
        heap.push(right);
        // Re-sum rather than update incrementally so rounding does not drift.
        auto copy = heap;
        double value = 0.0;
        double error = 0.0;
        while (!copy.empty()) {
            value += copy.top().value;
            error += copy.top().error;
            copy.pop();
        }
        r.value = value;
        r.error = error;
    }
    return r;
}

/// Integrates over [a, b] split at the given interior breakpoints (kinks of the integrand).
template <class F>
Result integrate_piecewise(F&& f, double a, double b, std::span<const double> breakpoints,
                           double abs_tol, double rel_tol) {
    std::vector<double> edges{a};
    for (double t : breakpoints) {
        if (t > a && t < b) edges.push_back(t);
    }
    edges.push_back(b);
    Result total;
    total.evaluations = 0;
    const double share = abs_tol / static_cast<double>(edges.size() - 1);
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        const auto part = integrate(f, edges[i], edges[i + 1], share, rel_tol);
        total.value += part.value;
        total.error += part.error;
        total.evaluations += part.evaluations;
        total.converged = total.converged && part.converged;
    }
    return total;
}

}  // namespace vnmeter::quad
