#pragma once

#include <algorithm>
#include <cmath>

#include "cfmm/black_scholes.hpp"
#include "cfmm/core.hpp"
#include "cfmm/normal.hpp"

namespace cfmm {

/// Swaps that would land within this margin of R1 in {0,1} are rejected
/// rather than clamped (quantile singularities at the boundary).
inline constexpr double kReserveMargin = 1e-12;

/// Immutable RMM-01 pool configuration.
struct Rmm01Params {
    double strike;    ///< K > 0, Token2 per Token1
    double sigma;     ///< implied volatility > 0
    double maturity;  ///< initial time to expiry >= 0
    Fee fee;

    void validate() const {
        if (!(strike > 0.0) || !std::isfinite(strike))
            throw DomainError("Rmm01Params: strike must be positive");
        if (!(sigma > 0.0) || !std::isfinite(sigma))
            throw DomainError("Rmm01Params: sigma must be positive");
        if (!(maturity >= 0.0) || !std::isfinite(maturity))
            throw DomainError("Rmm01Params: maturity must be nonnegative");
        fee.validate();
    }
    OptionParams option(double tau) const { return {strike, sigma, tau}; }
};

/// phi(R) = -K*Phi(Phi^{-1}(1-R1) - sigma*sqrt(tau)) + R2 for tau > 0;
/// the constant-sum form -K*(1-R1) + R2 at expiry. k = 0 is perfect
/// replication; k > 0 over-replicates.
inline double rmm01_trading_function(const Reserves& r, const Rmm01Params& params, double tau) {
    params.validate();
    if (!(tau >= 0.0)) throw DomainError("rmm01_trading_function: tau must be nonnegative");
    if (tau == 0.0) {
        if (!r.finite_nonnegative())
            throw DomainError("rmm01_trading_function: reserves must be nonnegative");
        return -params.strike * (1.0 - r.r1) + r.r2;
    }
    if (!r.finite_nonnegative() || r.r1 > 1.0)
        throw DomainError("rmm01_trading_function: R1 must lie in [0,1] before expiry");
    // Closed-boundary limits, reached when the true R1 rounds to 0 or 1 in
    // double for deep-in/out-of-the-money pools.
    if (r.r1 == 0.0) return r.r2 - params.strike;
    if (r.r1 == 1.0) return r.r2;
    const double vol = params.sigma * std::sqrt(tau);
    // Phi^{-1}(1-R1) = -Phi^{-1}(R1), keeping accuracy for R1 near 1.
    const double d = -normal_quantile(r.r1);
    return r.r2 - params.strike * normal_cdf(d - vol);
}

/// RMM-01 trading curve at a fixed tau, usable with the generic core ops.
struct Rmm01Curve {
    double strike;
    double sigma;
    double tau;

    double evaluate(const Reserves& r) const {
        return rmm01_trading_function(r, {strike, sigma, std::max(tau, 0.0), Fee{1.0}}, tau);
    }
    PriceVector price_vector(const Reserves& r) const {
        if (tau == 0.0) return {strike, 1.0};
        const double vol = sigma * std::sqrt(tau);
        const double d = -normal_quantile(r.r1);
        return {strike * normal_pdf(d - vol) / normal_pdf(d), 1.0};
    }
    bool in_domain(const Reserves& r) const {
        if (!r.finite_nonnegative()) return false;
        if (tau == 0.0) return true;
        return r.r1 > 0.0 && r.r1 < 1.0;
    }
    double token2_out(const Reserves& r, double in1) const {
        if (tau == 0.0) return strike * in1;
        const double k = std::max(evaluate(r), 0.0);
        const double r1_new = r.r1 + in1;
        if (!(r1_new < 1.0 - kReserveMargin))
            throw LiquidityError("Rmm01Curve: swap would exhaust Token1 capacity");
        const double vol = sigma * std::sqrt(tau);
        return r.r2 - k - strike * normal_cdf(-normal_quantile(r1_new) - vol);
    }
    double token1_out(const Reserves& r, double in2) const {
        if (tau == 0.0) return in2 / strike;
        const double k = std::max(evaluate(r), 0.0);
        const double u_new = (r.r2 - k + in2) / strike;
        if (!(u_new > kReserveMargin && u_new < 1.0 - kReserveMargin))
            throw LiquidityError("Rmm01Curve: swap would exhaust Token2 capacity");
        const double vol = sigma * std::sqrt(tau);
        // 1 - Phi(x) = Phi(-x)
        return r.r1 - normal_cdf(-(normal_quantile(u_new) + vol));
    }
};

/// Per-LPT pool state. invariant_k is recomputed after every change.
struct Rmm01State {
    Reserves reserves;
    double tau = 0.0;
    double invariant_k = 0.0;
};

inline Rmm01State make_state(const Reserves& r, const Rmm01Params& params, double tau) {
    return {r, tau, rmm01_trading_function(r, params, tau)};
}

/// Reserves on the perfect-replication (k=0) curve reporting price S:
/// R1 = 1 - Phi(d1), R2 = K*Phi(d2).
inline Reserves reserves_from_price(double spot, const Rmm01Params& params, double tau) {
    params.validate();
    if (!(spot > 0.0) || !std::isfinite(spot))
        throw DomainError("reserves_from_price: spot must be positive");
    if (!(tau > 0.0))
        throw DomainError("reserves_from_price: tau must be positive (expiry pools admit any constant-sum point)");
    const auto d = d1_d2(spot, params.option(tau));
    return {normal_cdf(-d.d1), params.strike * normal_cdf(d.d2)};
}

inline Rmm01State state_from_price(double spot, const Rmm01Params& params, double tau) {
    return make_state(reserves_from_price(spot, params, tau), params, tau);
}

/// p = K*exp(Phi^{-1}(1-R1)*sigma*sqrt(tau) - sigma^2*tau/2); K at expiry.
/// The inverse-CDF argument is taken from whichever reserve coordinate is
/// better conditioned: R1 directly when R1 < 1/2, otherwise the on-curve
/// Token2 coordinate (R2 - k)/K. Both agree up to rounding by the
/// definition of the invariant.
inline double reported_price(const Rmm01State& state, const Rmm01Params& params) {
    params.validate();
    if (state.tau == 0.0) return params.strike;
    const double vol = params.sigma * std::sqrt(state.tau);
    const double r1 = state.reserves.r1;
    double d;
    if (r1 > 0.0 && r1 < 0.5) {
        d = -normal_quantile(r1);
    } else {
        // An invariant within the validity tolerance of zero is rounding
        // noise from the ill-conditioned R1 coordinate (R1 near 1), not a
        // real offset; subtracting it would destroy the R2 coordinate.
        const double k = (std::abs(state.invariant_k) <= kInvariantTol * params.strike)
                             ? 0.0
                             : state.invariant_k;
        const double u = (state.reserves.r2 - k) / params.strike;
        if (u > 0.0 && u < 1.0) {
            d = normal_quantile(u) + vol;
        } else if (r1 > 0.0 && r1 < 1.0) {
            d = -normal_quantile(r1);
        } else {
            throw DomainError("reported_price: reserves outside RMM-01 domain");
        }
    }
    return params.strike * std::exp(d * vol - 0.5 * vol * vol);
}

/// Per-LPT reserve value p*R1 + R2; equals the covered-call value at k=0
/// when the reported price matches the market price.
inline double lpt_value(const Rmm01State& state, const Rmm01Params& params) {
    if (state.tau == 0.0) {
        return params.strike * state.reserves.r1 + state.reserves.r2;
    }
    return reported_price(state, params) * state.reserves.r1 + state.reserves.r2;
}

struct SwapQuote {
    double lambda = 0.0;     ///< received quantity (Token2 for token1-in, Token1 for token2-in)
    double new_price = 0.0;  ///< price at the gamma-discounted point on the invariant curve
    Rmm01State new_state;
};

/// Invariant level swaps quote against. Fee accrual (k > 0) is carried so
/// LPs keep it; time-decay deficits (k < 0) are NOT honored — the pool
/// floors its quoting level at the perfect-replication curve, so the next
/// trade absorbs the deficit. Without this floor the deficit compounds
/// into a terminal replication error equal to the accumulated decay,
/// which no arbitrage frequency can remove.
inline double quote_level(const Rmm01State& state) {
    return std::max(state.invariant_k, 0.0);
}

/// Tender delta1 Token1, receive Token2. Closed-form level preservation
/// on the gamma-discounted basket at quote_level; the full delta is
/// credited to reserves, so the invariant weakly increases when gamma<1.
inline SwapQuote swap_exact_token1_in(const Rmm01State& state, const Rmm01Params& params,
                                      double delta1) {
    params.validate();
    if (!(delta1 > 0.0) || !std::isfinite(delta1))
        throw DomainError("swap_exact_token1_in: delta1 must be positive");
    const double g = params.fee.gamma;
    const Reserves& r = state.reserves;

    if (state.tau == 0.0) {
        const double lambda2 = g * params.strike * delta1;
        if (lambda2 >= r.r2)
            throw LiquidityError("swap_exact_token1_in: insufficient Token2 at expiry");
        Rmm01State ns = make_state({r.r1 + delta1, r.r2 - lambda2}, params, 0.0);
        return {lambda2, params.strike, ns};
    }

    const double r1_eff = r.r1 + g * delta1;
    if (!(r1_eff < 1.0 - kReserveMargin) || !(r.r1 + delta1 < 1.0 - kReserveMargin))
        throw LiquidityError("swap_exact_token1_in: trade exhausts Token1 capacity");
    const double vol = params.sigma * std::sqrt(state.tau);
    const double d_new = -normal_quantile(r1_eff);
    const double lambda2 =
        r.r2 - quote_level(state) - params.strike * normal_cdf(d_new - vol);
    if (!(lambda2 > 0.0) || lambda2 >= r.r2)
        throw LiquidityError(
            "swap_exact_token1_in: quote not executable (output nonpositive or exceeds reserve)");
    const double new_price = params.strike * std::exp(d_new * vol - 0.5 * vol * vol);
    Rmm01State ns = make_state({r.r1 + delta1, r.r2 - lambda2}, params, state.tau);
    return {lambda2, new_price, ns};
}

/// Tender delta2 Token2, receive Token1.
inline SwapQuote swap_exact_token2_in(const Rmm01State& state, const Rmm01Params& params,
                                      double delta2) {
    params.validate();
    if (!(delta2 > 0.0) || !std::isfinite(delta2))
        throw DomainError("swap_exact_token2_in: delta2 must be positive");
    const double g = params.fee.gamma;
    const Reserves& r = state.reserves;

    if (state.tau == 0.0) {
        const double lambda1 = g * delta2 / params.strike;
        if (lambda1 >= r.r1)
            throw LiquidityError("swap_exact_token2_in: insufficient Token1 at expiry");
        Rmm01State ns = make_state({r.r1 - lambda1, r.r2 + delta2}, params, 0.0);
        return {lambda1, params.strike, ns};
    }

    const double u_new = (r.r2 - quote_level(state) + g * delta2) / params.strike;
    if (!(u_new > kReserveMargin && u_new < 1.0 - kReserveMargin))
        throw LiquidityError("swap_exact_token2_in: trade exhausts Token2 capacity");
    const double vol = params.sigma * std::sqrt(state.tau);
    const double q = normal_quantile(u_new);
    const double lambda1 = r.r1 - normal_cdf(-(q + vol));
    if (!(lambda1 > 0.0) || lambda1 >= r.r1)
        throw LiquidityError(
            "swap_exact_token2_in: quote not executable (output nonpositive or exceeds reserve)");
    const double new_price = params.strike * std::exp(q * vol + 0.5 * vol * vol);
    Rmm01State ns = make_state({r.r1 - lambda1, r.r2 + delta2}, params, state.tau);
    return {lambda1, new_price, ns};
}

/// Token1 amount moving the reported price to (1+epsilon)*p; epsilon < 0
/// (tendering Token1 only lowers the price).
inline double manipulation_delta1(const Rmm01State& state, const Rmm01Params& params,
                                  double epsilon) {
    params.validate();
    if (epsilon == 0.0) return 0.0;
    if (!(epsilon > -1.0)) throw DomainError("manipulation_delta1: epsilon must exceed -1");
    if (epsilon > 0.0)
        throw WrongDirectionError("manipulation_delta1: tendering Token1 lowers the price; epsilon must be negative");
    if (!(state.tau > 0.0))
        throw DomainError("manipulation_delta1: price is pinned at K at expiry");
    const double vol = params.sigma * std::sqrt(state.tau);
    const double d = -normal_quantile(state.reserves.r1);
    const double x = d + std::log1p(epsilon) / vol;
    // 1 - R1 - Phi(x) = Phi(-x) - R1
    return (normal_cdf(-x) - state.reserves.r1) / params.fee.gamma;
}

/// Token2 amount moving the reported price to (1+epsilon)*p; epsilon > 0.
inline double manipulation_delta2(const Rmm01State& state, const Rmm01Params& params,
                                  double epsilon) {
    params.validate();
    if (epsilon == 0.0) return 0.0;
    if (epsilon < 0.0)
        throw WrongDirectionError("manipulation_delta2: tendering Token2 raises the price; epsilon must be positive");
    if (!(state.tau > 0.0))
        throw DomainError("manipulation_delta2: price is pinned at K at expiry");
    const double vol = params.sigma * std::sqrt(state.tau);
    const double d = -normal_quantile(state.reserves.r1);
    const double target = params.strike * normal_cdf(d - vol + std::log1p(epsilon) / vol);
    return (target - (state.reserves.r2 - quote_level(state))) / params.fee.gamma;
}

/// Infinitesimal price impact along the invariant-curve tangent:
/// p*sigma*sqrt(tau)/phi(Phi^{-1}(1-R1)). Zero at expiry (flat curve).
inline double rmm_directional_price_derivative(const Rmm01State& state,
                                               const Rmm01Params& params) {
    params.validate();
    if (state.tau == 0.0) return 0.0;
    if (!(state.reserves.r1 > 0.0 && state.reserves.r1 < 1.0))
        throw DomainError("rmm_directional_price_derivative: R1 must lie in (0,1)");
    const double vol = params.sigma * std::sqrt(state.tau);
    const double p = reported_price(state, params);
    return p * vol / normal_pdf(normal_quantile(state.reserves.r1));
}

/// Threshold 2*phi(Phi^{-1}(1-r1)): RMM-01 beats Uniswap on infinitesimal
/// price impact at equal price iff sigma*sqrt(tau) is below this value.
inline double uniswap_dominance_bound(double r1) {
    if (!(r1 > 0.0 && r1 < 1.0))
        throw DomainError("uniswap_dominance_bound: r1 must lie in (0,1)");
    return 2.0 * normal_pdf(normal_quantile(r1));
}

/// Time decay: reserves unchanged, tau floored at zero, invariant
/// recomputed against the new curve (the k drift is the replication
/// error source between arbitrage events).
inline Rmm01State advance_time(const Rmm01State& state, const Rmm01Params& params, double dt) {
    if (!(dt >= 0.0) || !std::isfinite(dt))
        throw DomainError("advance_time: dt must be nonnegative");
    const double tau = std::max(state.tau - dt, 0.0);
    return make_state(state.reserves, params, tau);
}

/// Pool wrapper scaling per-LPT state by LPT supply. Liquidity changes
/// mint and burn LPTs at the current per-LPT reserve ratio, which is
/// trivially price-preserving.
struct Rmm01Pool {
    Rmm01State state;
    double lpt_supply = 1.0;

    Basket pool_reserves() const {
        return {state.reserves.r1 * lpt_supply, state.reserves.r2 * lpt_supply};
    }

    /// Mints LPTs for a basket proportional to per-LPT reserves.
    double add_liquidity(const Basket& basket) {
        if (!basket.nonnegative() || basket.is_zero())
            throw InvalidLiquidityError("add_liquidity: basket must be nonnegative, nonzero");
        const Reserves& r = state.reserves;
        const double m1 = (r.r1 > 0.0) ? basket.a1 / r.r1 : 0.0;
        const double m2 = (r.r2 > 0.0) ? basket.a2 / r.r2 : 0.0;
        if (r.r1 > 0.0 && r.r2 > 0.0 && std::abs(m1 - m2) > 1e-9 * std::max(m1, m2))
            throw InvalidLiquidityError("add_liquidity: basket not proportional to reserves");
        const double minted = std::max(m1, m2);
        lpt_supply += minted;
        return minted;
    }

    /// Burns LPTs, returning the pro-rata basket.
    Basket remove_liquidity(double lpts) {
        if (!(lpts > 0.0) || lpts > lpt_supply)
            throw LiquidityError("remove_liquidity: burn amount exceeds supply");
        lpt_supply -= lpts;
        return {state.reserves.r1 * lpts, state.reserves.r2 * lpts};
    }
};

}  // namespace cfmm
