#pragma once

#include <cmath>
#include <limits>

#include "cfmm/errors.hpp"

namespace cfmm {

inline constexpr double kInvSqrt2Pi = 0.3989422804014326779399461;
inline constexpr double kSqrt2 = 1.4142135623730950488016887;

/// Standard normal density e^(-x^2/2)/sqrt(2*pi).
inline double normal_pdf(double x) {
    if (!std::isfinite(x)) throw DomainError("normal_pdf: non-finite argument");
    return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

/// Standard normal CDF via the complementary error function.
/// Accurate in both tails (relative accuracy follows erfc).
inline double normal_cdf(double x) {
    if (!std::isfinite(x)) throw DomainError("normal_cdf: non-finite argument");
    return 0.5 * std::erfc(-x / kSqrt2);
}

namespace detail {

// Acklam's rational approximation to the normal quantile.
// Max relative error ~1.15e-9; refined by Newton below.
inline double quantile_initial_guess(double u) {
    static constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                    -2.759285104469687e+02, 1.383577518672690e+02,
                                    -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                    -1.556989798598866e+02, 6.680131188771972e+01,
                                    -1.328068155288572e+01};
    static constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                    -2.400758277161838e+00, -2.549732539343734e+00,
                                    4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                    2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double u_low = 0.02425;

    if (u < u_low) {
        const double q = std::sqrt(-2.0 * std::log(u));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (u > 1.0 - u_low) {
        const double q = std::sqrt(-2.0 * std::log(1.0 - u));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = u - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace detail

/// Inverse of normal_cdf on (0,1). Rational initial guess plus Newton
/// refinement; round-trips through normal_cdf to better than 1e-12
/// absolute on [1e-10, 1-1e-10].
inline double normal_quantile(double u) {
    if (!(u > 0.0 && u < 1.0)) throw DomainError("normal_quantile: argument outside (0,1)");
    double x = detail::quantile_initial_guess(u);
    for (int i = 0; i < 2; ++i) {
        const double err = normal_cdf(x) - u;
        const double pdf = normal_pdf(x);
        if (pdf <= std::numeric_limits<double>::min()) break;
        x -= err / pdf;
    }
    return x;
}

/// Phi^{-1}(1-u) computed without forming 1-u, so tiny complements
/// survive. Uses the reflection Phi^{-1}(1-u) = -Phi^{-1}(u).
inline double normal_quantile_complement(double u) { return -normal_quantile(u); }

}  // namespace cfmm
