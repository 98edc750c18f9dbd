#pragma once

// Test-only oracles, independent of the closed-form implementation paths
// they check: bisection root-finding on the swap validity equation and
// finite-difference derivatives.

#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include "cfmm/core.hpp"

namespace testsupport {

// Solves phi(r1 + in_eff, r2 - lambda2) = level for lambda2 by bisection.
// in_eff is the fee-discounted tendered Token1; the level defaults to the
// current invariant (pure level-set swap).
template <cfmm::TradingCurve F>
double bisect_lambda2(const F& tf, const cfmm::Reserves& r, double in_eff,
                      double level = std::numeric_limits<double>::quiet_NaN()) {
    const double k0 = std::isnan(level) ? tf.evaluate(r) : level;
    auto f = [&](double lam) {
        return tf.evaluate({r.r1 + in_eff, r.r2 - lam}) - k0;
    };
    double lo = 0.0, hi = r.r2;
    // f decreases in lambda; f(0) > 0 because the curve increases in r1.
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

// Solves phi(r1 - lambda1, r2 + in_eff) = level for lambda1.
template <cfmm::TradingCurve F>
double bisect_lambda1(const F& tf, const cfmm::Reserves& r, double in_eff,
                      double level = std::numeric_limits<double>::quiet_NaN()) {
    const double k0 = std::isnan(level) ? tf.evaluate(r) : level;
    auto f = [&](double lam) {
        return tf.evaluate({r.r1 - lam, r.r2 + in_eff}) - k0;
    };
    double lo = 0.0, hi = r.r1;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

inline double central_diff(const std::function<double(double)>& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

struct Rng {
    std::mt19937_64 gen;
    explicit Rng(std::uint64_t seed) : gen(seed) {}
    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(gen);
    }
};

}  // namespace testsupport
