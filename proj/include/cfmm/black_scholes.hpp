#pragma once

#include <algorithm>
#include <cmath>

#include "cfmm/errors.hpp"
#include "cfmm/normal.hpp"

namespace cfmm {

/// Black--Scholes contract parameters. sigma and tau share one arbitrary
/// time unit; only sigma*sqrt(tau) enters any formula. No risk-free rate.
struct OptionParams {
    double strike;  ///< K > 0, Token2 per Token1
    double sigma;   ///< implied volatility > 0, per sqrt(time unit)
    double tau;     ///< time to expiry >= 0

    void validate() const {
        if (!(strike > 0.0) || !std::isfinite(strike))
            throw DomainError("OptionParams: strike must be positive");
        if (!(sigma > 0.0) || !std::isfinite(sigma))
            throw DomainError("OptionParams: sigma must be positive");
        if (!(tau >= 0.0) || !std::isfinite(tau))
            throw DomainError("OptionParams: tau must be nonnegative");
    }
};

struct D1D2 {
    double d1;
    double d2;
};

inline D1D2 d1_d2(double spot, const OptionParams& p) {
    p.validate();
    if (!(spot > 0.0) || !std::isfinite(spot))
        throw DomainError("d1_d2: spot must be positive");
    if (!(p.tau > 0.0)) throw DomainError("d1_d2: tau must be positive");
    const double vol = p.sigma * std::sqrt(p.tau);
    const double d1 = (std::log(spot / p.strike) + 0.5 * vol * vol) / vol;
    return {d1, d1 - vol};
}

/// S*Phi(d1) - K*Phi(d2); intrinsic max(S-K, 0) at expiry.
inline double call_value(double spot, const OptionParams& p) {
    p.validate();
    if (!(spot > 0.0) || !std::isfinite(spot))
        throw DomainError("call_value: spot must be positive");
    if (p.tau == 0.0) return std::max(spot - p.strike, 0.0);
    const auto d = d1_d2(spot, p);
    return spot * normal_cdf(d.d1) - p.strike * normal_cdf(d.d2);
}

/// S*Phi(-d1) + K*Phi(d2); min(S, K) at expiry. Equals S - call_value.
inline double covered_call_value(double spot, const OptionParams& p) {
    p.validate();
    if (!(spot > 0.0) || !std::isfinite(spot))
        throw DomainError("covered_call_value: spot must be positive");
    if (p.tau == 0.0) return std::min(spot, p.strike);
    const auto d = d1_d2(spot, p);
    return spot * normal_cdf(-d.d1) + p.strike * normal_cdf(d.d2);
}

/// K*Phi(-d2) - S*Phi(-d1); put-call parity: call - S + K.
inline double put_value(double spot, const OptionParams& p) {
    p.validate();
    if (!(spot > 0.0) || !std::isfinite(spot))
        throw DomainError("put_value: spot must be positive");
    if (p.tau == 0.0) return std::max(p.strike - spot, 0.0);
    const auto d = d1_d2(spot, p);
    return p.strike * normal_cdf(-d.d2) - spot * normal_cdf(-d.d1);
}

}  // namespace cfmm
