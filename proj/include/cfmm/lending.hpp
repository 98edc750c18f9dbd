#pragma once

#include <cmath>

#include "cfmm/black_scholes.hpp"
#include "cfmm/errors.hpp"

namespace cfmm {

/// Borrow-one-LPT-and-sell position collateralized in Token1. All legs
/// are in Token1 units; x is the LPT sale proceeds at entry, y the
/// collateral, z the exposure adjustment making x + y + z = 1.
struct SyntheticCall {
    double x;
    double y;
    double z;
    double strike;
    double sigma;
    double entry_price;
    double entry_tau;
    bool liquidated = false;

    OptionParams option(double tau) const { return {strike, sigma, tau}; }
};

/// Enter at market price S with collateral y >= x; the LPT sells for
/// x = vcc(S)/S Token1 and z = 1 - x - y completes one unit of exposure
/// (negative z sells excess exposure).
inline SyntheticCall enter_synthetic_call(double spot, const OptionParams& params,
                                          double collateral) {
    params.validate();
    if (!(params.tau > 0.0)) throw DomainError("enter_synthetic_call: tau must be positive");
    const double x = covered_call_value(spot, params) / spot;
    if (!(collateral >= x))
        throw UndercollateralizedError("enter_synthetic_call: collateral below LPT sale value");
    return {x,           collateral, 1.0 - x - collateral, params.strike,
            params.sigma, spot,       params.tau,           false};
}

struct SynthCallValue {
    double unadjusted;  ///< (x+y)S - vcc(S,tau)
    double adjusted;    ///< with the z leg: S - vcc = call value
};

inline SynthCallValue value_synthetic_call(const SyntheticCall& pos, double spot, double tau) {
    if (pos.liquidated) {
        // Collateral forfeited; the x and z legs remain.
        return {pos.x * spot, (pos.x + pos.z) * spot};
    }
    const double vcc = covered_call_value(spot, pos.option(tau));
    return {(pos.x + pos.y) * spot - vcc, (pos.x + pos.y + pos.z) * spot - vcc};
}

/// Loan-to-value below one: debt (the LPT, worth vcc) exceeds the
/// collateral value y*S.
inline bool check_liquidation(const SyntheticCall& pos, double spot, double tau) {
    if (pos.liquidated) return true;
    return covered_call_value(spot, pos.option(tau)) > pos.y * spot;
}

/// Applies the liquidation check and keeps the flag sticky.
inline SyntheticCall mark_liquidation(SyntheticCall pos, double spot, double tau) {
    if (check_liquidation(pos, spot, tau)) pos.liquidated = true;
    return pos;
}

/// Buy back the LPT, repay, recover collateral. Liquidated positions
/// return the salvage of the x and z legs only.
inline double exit_synthetic_call(const SyntheticCall& pos, double spot, double tau) {
    return value_synthetic_call(pos, spot, tau).adjusted;
}

/// Equity of the core (x, y) legs, excluding the plain-exposure z leg.
/// Bounded below by zero, which gives the y*S_entry maximal-loss bound.
inline double core_equity(const SyntheticCall& pos, double spot, double tau) {
    if (pos.liquidated) return pos.x * spot;
    return (pos.x + pos.y) * spot - covered_call_value(spot, pos.option(tau));
}

/// Loss of the core position relative to the collateral value at entry.
inline double realized_core_loss(const SyntheticCall& pos, double spot, double tau) {
    return pos.y * pos.entry_price - core_equity(pos, spot, tau);
}

/// Token2-collateralized variant: legs x2 (sale proceeds = vcc at entry),
/// y2 (collateral), z2. When the legs sum to K the adjusted value is the
/// Black--Scholes put; otherwise the constant offset is reported.
struct SyntheticPut {
    double x2;
    double y2;
    double z2;
    double strike;
    double sigma;
    double entry_price;
    double entry_tau;
    bool liquidated = false;

    OptionParams option(double tau) const { return {strike, sigma, tau}; }
    double leg_sum() const { return x2 + y2 + z2; }
    double offset() const { return leg_sum() - strike; }
};

inline SyntheticPut enter_synthetic_put(double spot, const OptionParams& params,
                                        double collateral,
                                        double adjustment = std::nan("")) {
    params.validate();
    if (!(params.tau > 0.0)) throw DomainError("enter_synthetic_put: tau must be positive");
    const double x2 = covered_call_value(spot, params);
    if (!(collateral >= x2))
        throw UndercollateralizedError("enter_synthetic_put: collateral below LPT sale value");
    const double z2 = std::isnan(adjustment) ? params.strike - x2 - collateral : adjustment;
    return {x2,           collateral, z2,         params.strike,
            params.sigma, spot,       params.tau, false};
}

struct SynthPutValue {
    double value;   ///< leg_sum - vcc(S,tau); equals put + offset
    double offset;  ///< leg_sum - K
};

inline SynthPutValue value_synthetic_put(const SyntheticPut& pos, double spot, double tau) {
    if (pos.liquidated) {
        return {pos.x2 + pos.z2, pos.offset()};
    }
    const double vcc = covered_call_value(spot, pos.option(tau));
    return {pos.leg_sum() - vcc, pos.offset()};
}

inline bool check_liquidation(const SyntheticPut& pos, double spot, double tau) {
    if (pos.liquidated) return true;
    return covered_call_value(spot, pos.option(tau)) > pos.y2;
}

}  // namespace cfmm
