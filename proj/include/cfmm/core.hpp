#pragma once

#include <cmath>
#include <concepts>
#include <string>

#include "cfmm/errors.hpp"

namespace cfmm {

/// Validity tolerance on the invariant scale (relative where the
/// invariant is nonzero, absolute otherwise).
inline constexpr double kInvariantTol = 1e-9;

/// Two-asset reserve vector. Per-LPT for RMM-01, absolute for Uniswap.
struct Reserves {
    double r1 = 0.0;
    double r2 = 0.0;

    bool finite_nonnegative() const {
        return std::isfinite(r1) && std::isfinite(r2) && r1 >= 0.0 && r2 >= 0.0;
    }
};

/// A one- or two-sided basket of the two assets.
struct Basket {
    double a1 = 0.0;
    double a2 = 0.0;

    bool is_zero() const { return a1 == 0.0 && a2 == 0.0; }
    bool nonnegative() const { return a1 >= 0.0 && a2 >= 0.0; }
};

/// A proposed trade: tendered basket delta, received basket lambda.
struct Trade {
    Basket delta;
    Basket lambda;
};

/// Input-side fee parameter, gamma in (0,1]. gamma = 1 means no fee.
struct Fee {
    double gamma = 1.0;

    void validate() const {
        if (!(gamma > 0.0 && gamma <= 1.0))
            throw DomainError("Fee: gamma must lie in (0,1]");
    }
};

/// Components of the trading-function gradient.
struct PriceVector {
    double p1 = 0.0;
    double p2 = 0.0;
};

/// A 2-asset trading curve: invariant evaluation, gradient, domain test,
/// and the closed-form "out given effective in" solves along level sets.
/// The in-quantities passed to token*_out are already fee-discounted.
template <class F>
concept TradingCurve = requires(const F& f, const Reserves& r, double q) {
    { f.evaluate(r) } -> std::convertible_to<double>;
    { f.price_vector(r) } -> std::convertible_to<PriceVector>;
    { f.in_domain(r) } -> std::convertible_to<bool>;
    { f.token2_out(r, q) } -> std::convertible_to<double>;
    { f.token1_out(r, q) } -> std::convertible_to<double>;
};

/// Generic constant-sum curve P1*R1 + P2*R2 (a limit order at P1/P2).
struct ConstantSum {
    double p1_const = 1.0;
    double p2_const = 1.0;

    double evaluate(const Reserves& r) const { return p1_const * r.r1 + p2_const * r.r2; }
    PriceVector price_vector(const Reserves&) const { return {p1_const, p2_const}; }
    bool in_domain(const Reserves& r) const { return r.finite_nonnegative(); }
    double token2_out(const Reserves&, double in1) const { return p1_const * in1 / p2_const; }
    double token1_out(const Reserves&, double in2) const { return p2_const * in2 / p1_const; }
};

template <TradingCurve F>
double evaluate(const F& tf, const Reserves& r) {
    if (!tf.in_domain(r)) throw DomainError("evaluate: reserves outside curve domain");
    return tf.evaluate(r);
}

template <TradingCurve F>
double reported_price(const F& tf, const Reserves& r) {
    if (!tf.in_domain(r)) throw DomainError("reported_price: reserves outside curve domain");
    const PriceVector pv = tf.price_vector(r);
    if (!(pv.p1 > 0.0 && pv.p2 > 0.0))
        throw DomainError("reported_price: price vector not positive");
    return pv.p1 / pv.p2;
}

/// Reserve value in Token2: (1/P2) * P . R = p*r1 + r2.
template <TradingCurve F>
double reserve_value(const F& tf, const Reserves& r) {
    return reported_price(tf, r) * r.r1 + r.r2;
}

struct SwapValidity {
    enum class Reason { Ok, EmptyTrade, NegativeBasket, DomainExit, InvariantMismatch };
    Reason reason = Reason::Ok;

    explicit operator bool() const { return reason == Reason::Ok; }
};

/// Checks phi(R + gamma*Delta - Lambda) == phi(R) within kInvariantTol.
template <TradingCurve F>
SwapValidity is_valid_swap(const F& tf, const Reserves& r, const Trade& t, Fee fee) {
    fee.validate();
    if (t.delta.is_zero() && t.lambda.is_zero())
        return {SwapValidity::Reason::EmptyTrade};
    if (!t.delta.nonnegative() || !t.lambda.nonnegative())
        return {SwapValidity::Reason::NegativeBasket};
    const Reserves post{r.r1 + fee.gamma * t.delta.a1 - t.lambda.a1,
                        r.r2 + fee.gamma * t.delta.a2 - t.lambda.a2};
    if (!tf.in_domain(post)) return {SwapValidity::Reason::DomainExit};
    const double k0 = tf.evaluate(r);
    const double k1 = tf.evaluate(post);
    const double scale = (k0 != 0.0) ? std::abs(k0) : 1.0;
    if (std::abs(k1 - k0) > kInvariantTol * scale)
        return {SwapValidity::Reason::InvariantMismatch};
    return {};
}

struct SwapResult {
    Basket lambda;
    Reserves reserves;  // R + Delta - Lambda: the full tendered basket is credited
};

/// Executes a single-sided swap: solves the received amount on the
/// gamma-discounted basket, credits the full tendered basket to reserves.
template <TradingCurve F>
SwapResult apply_swap(const F& tf, const Reserves& r, const Basket& delta, Fee fee) {
    fee.validate();
    if (!tf.in_domain(r)) throw DomainError("apply_swap: reserves outside curve domain");
    const bool in1 = delta.a1 > 0.0;
    const bool in2 = delta.a2 > 0.0;
    if (in1 == in2)
        throw DomainError("apply_swap: exactly one of delta1, delta2 must be positive");

    Basket lambda;
    if (in1) {
        lambda.a2 = tf.token2_out(r, fee.gamma * delta.a1);
        if (!(lambda.a2 >= 0.0) || lambda.a2 >= r.r2)
            throw LiquidityError("apply_swap: received amount exceeds Token2 reserve");
    } else {
        lambda.a1 = tf.token1_out(r, fee.gamma * delta.a2);
        if (!(lambda.a1 >= 0.0) || lambda.a1 >= r.r1)
            throw LiquidityError("apply_swap: received amount exceeds Token1 reserve");
    }
    const Reserves post{r.r1 + delta.a1 - lambda.a1, r.r2 + delta.a2 - lambda.a2};
    if (!tf.in_domain(post)) throw DomainError("apply_swap: post-trade reserves leave domain");
    return {lambda, post};
}

enum class LiquidityDirection { Add, Remove };

/// Applies a liquidity change, requiring the reported price to be
/// preserved to 1e-9 relative.
template <TradingCurve F>
Reserves apply_liquidity_change(const F& tf, const Reserves& r, const Basket& basket,
                                LiquidityDirection dir) {
    if (basket.is_zero() || !basket.nonnegative())
        throw InvalidLiquidityError("apply_liquidity_change: basket must be nonnegative, nonzero");
    const double sign = (dir == LiquidityDirection::Add) ? 1.0 : -1.0;
    const Reserves post{r.r1 + sign * basket.a1, r.r2 + sign * basket.a2};
    if (post.r1 < 0.0 || post.r2 < 0.0)
        throw LiquidityError("apply_liquidity_change: removal exceeds reserves");
    if (!tf.in_domain(post))
        throw DomainError("apply_liquidity_change: post-change reserves leave domain");
    const double p_before = reported_price(tf, r);
    const double p_after = reported_price(tf, post);
    if (std::abs(p_after - p_before) > 1e-9 * p_before)
        throw InvalidLiquidityError("apply_liquidity_change: basket does not preserve price");
    return post;
}

}  // namespace cfmm
