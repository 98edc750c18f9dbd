#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "cfmm/black_scholes.hpp"
#include "cfmm/rmm01.hpp"
#include "cfmm/uniswap.hpp"

namespace cfmm {

struct GbmParams {
    double s0;
    double mu = 0.0;
    double sigma_path = 0.0;
    double dt;
    std::int64_t steps;
    std::uint64_t seed = 0;

    void validate() const {
        if (!(s0 > 0.0)) throw DomainError("GbmParams: s0 must be positive");
        if (!(dt > 0.0)) throw DomainError("GbmParams: dt must be positive");
        if (steps < 1) throw DomainError("GbmParams: steps must be >= 1");
        if (!(sigma_path >= 0.0)) throw DomainError("GbmParams: sigma_path must be nonnegative");
        if (!std::isfinite(mu)) throw DomainError("GbmParams: mu must be finite");
    }
};

struct PricePath {
    std::vector<double> times;
    std::vector<double> prices;
};

/// Seeded exact-discretization GBM. Normals are drawn by inverting the
/// normal CDF on 53-bit uniforms from mt19937_64, so identical seeds give
/// identical paths bit for bit.
inline PricePath gbm_path(const GbmParams& params) {
    params.validate();
    std::mt19937_64 gen(params.seed);
    auto uniform01 = [&gen]() {
        return (static_cast<double>(gen() >> 11) + 0.5) * 0x1.0p-53;
    };
    PricePath path;
    path.times.reserve(params.steps + 1);
    path.prices.reserve(params.steps + 1);
    path.times.push_back(0.0);
    path.prices.push_back(params.s0);
    const double drift = (params.mu - 0.5 * params.sigma_path * params.sigma_path) * params.dt;
    const double diffusion = params.sigma_path * std::sqrt(params.dt);
    double s = params.s0;
    for (std::int64_t i = 1; i <= params.steps; ++i) {
        const double z = (diffusion > 0.0) ? normal_quantile(uniform01()) : 0.0;
        s *= std::exp(drift + diffusion * z);
        path.times.push_back(static_cast<double>(i) * params.dt);
        path.prices.push_back(s);
    }
    return path;
}

/// No-arbitrage interval [gamma*m, m/gamma] for external price m.
struct ArbBounds {
    double lower;
    double upper;
};

inline ArbBounds arb_bounds(double external_price, Fee fee) {
    fee.validate();
    if (!(external_price > 0.0)) throw DomainError("arb_bounds: external price must be positive");
    return {fee.gamma * external_price, external_price / fee.gamma};
}

/// Target-price selection for the arbitrageur. Boundary moves the
/// reported price to the nearest no-arb bound; PaperEpsilon applies the
/// literal epsilon = 1/gamma - 1 (increase) or gamma - 1 (decrease).
enum class ArbRule { Boundary, PaperEpsilon };

enum class ArbSide { None, Token1In, Token2In };

struct ArbResult {
    ArbSide side = ArbSide::None;
    double delta_in = 0.0;
    double lambda_out = 0.0;
    double profit = 0.0;    ///< received minus tendered, valued at the external price
    bool partial = false;   ///< trade truncated at the reserve-domain boundary
    Rmm01State new_state;
};

/// Executes the profit-maximizing arbitrage swap against an RMM-01 pool.
/// No-op when the reported price already sits inside the bounds, and also
/// when the candidate trade is not profitable at the external price: a
/// decayed pool quotes below its own curve, and a rational arbitrageur
/// only repegs it once the price gap covers that restoration cost.
inline ArbResult arb_step(const Rmm01State& state, const Rmm01Params& params,
                          double external_price, ArbRule rule = ArbRule::Boundary) {
    params.validate();
    if (!(external_price > 0.0))
        throw DomainError("arb_step: external price must be positive");
    const double g = params.fee.gamma;
    const auto bounds = arb_bounds(external_price, params.fee);

    ArbResult result;
    result.new_state = state;
    const Reserves& r = state.reserves;

    if (state.tau == 0.0) {
        // Expiry: constant-sum market at price K with fee g. Profitable
        // trades drain one side entirely.
        const double K = params.strike;
        if (external_price > K / g && r.r1 > 0.0) {
            const double lam1 = r.r1 * (1.0 - 1e-15);
            const double delta2 = lam1 * K / g;
            auto quote = swap_exact_token2_in(state, params, delta2);
            result = {ArbSide::Token2In, delta2, quote.lambda,
                      quote.lambda * external_price - delta2, false, quote.new_state};
        } else if (external_price < g * K && r.r2 > 0.0) {
            const double lam2 = r.r2 * (1.0 - 1e-15);
            const double delta1 = lam2 / (g * K);
            auto quote = swap_exact_token1_in(state, params, delta1);
            result = {ArbSide::Token1In, delta1, quote.lambda,
                      quote.lambda - delta1 * external_price, false, quote.new_state};
        }
        return result;
    }

    const double p = reported_price(state, params);
    if (p > bounds.upper) {
        const double target = (rule == ArbRule::Boundary) ? bounds.upper : p * g;
        double delta1 = manipulation_delta1(state, params, target / p - 1.0);
        const double max_delta1 = 1.0 - 2.0 * kReserveMargin - r.r1;
        bool partial = false;
        if (delta1 > max_delta1) {
            delta1 = max_delta1;
            partial = true;
        }
        if (delta1 <= 0.0) return result;
        try {
            auto quote = swap_exact_token1_in(state, params, delta1);
            const double profit = quote.lambda - delta1 * external_price;
            if (profit < 0.0) return result;
            result = {ArbSide::Token1In, delta1, quote.lambda, profit, partial,
                      quote.new_state};
        } catch (const LiquidityError&) {
            return result;
        }
    } else if (p < bounds.lower) {
        const double target = (rule == ArbRule::Boundary) ? bounds.lower : p / g;
        double delta2 = manipulation_delta2(state, params, target / p - 1.0);
        const double max_delta2 =
            (params.strike * (1.0 - 2.0 * kReserveMargin) - (r.r2 - quote_level(state))) / g;
        bool partial = false;
        if (delta2 > max_delta2) {
            delta2 = max_delta2;
            partial = true;
        }
        if (delta2 <= 0.0) return result;
        try {
            auto quote = swap_exact_token2_in(state, params, delta2);
            const double profit = quote.lambda * external_price - delta2;
            if (profit < 0.0) return result;
            result = {ArbSide::Token2In, delta2, quote.lambda, profit, partial,
                      quote.new_state};
        } catch (const LiquidityError&) {
            return result;
        }
    }
    return result;
}

struct ReplicationRecord {
    double t;
    double tau;
    double spot;
    double price;
    double invariant_k;
    double lpt_value;
    double cc_value;
    ArbSide arb_side;
    double arb_in;
    double arb_out;
    double fees_cum;
};

struct ReplicationReport {
    std::vector<ReplicationRecord> records;
    double terminal_lpt_value = 0.0;
    double terminal_payoff = 0.0;  ///< min(S_T, K)
    double max_abs_k = 0.0;
    double total_fee_income = 0.0;  ///< Token2 value of fee remainders at trade time
};

/// One covered-call replication run against an explicit external price
/// path: per tick, time decay first, then the price move, then arbitrage.
inline ReplicationReport run_replication(const Rmm01Params& params, const PricePath& path,
                                         ArbRule rule = ArbRule::Boundary) {
    params.validate();
    const double tau0 = params.maturity;
    if (!(tau0 > 0.0)) throw DomainError("run_replication: maturity must be positive");
    const std::size_t n = path.times.size();
    if (n < 2 || path.prices.size() != n)
        throw DomainError("run_replication: path needs at least two aligned points");
    if (path.times.front() != 0.0)
        throw DomainError("run_replication: path must start at t = 0");
    for (std::size_t i = 0; i < n; ++i) {
        if (!(path.prices[i] > 0.0))
            throw DomainError("run_replication: path prices must be positive");
        if (i > 0 && !(path.times[i] > path.times[i - 1]))
            throw DomainError("run_replication: path times must be increasing");
    }
    if (path.times.back() > tau0 * (1.0 + 1e-9))
        throw DomainError("run_replication: horizon exceeds time to expiry");

    const std::int64_t steps = static_cast<std::int64_t>(n) - 1;
    Rmm01State state = state_from_price(path.prices.front(), params, tau0);

    ReplicationReport report;
    report.records.reserve(n);
    double fees_cum = 0.0;
    auto record = [&](double t, double spot, const ArbResult& arb) {
        const double p = (state.tau == 0.0) ? params.strike : reported_price(state, params);
        ReplicationRecord rec{t,
                              state.tau,
                              spot,
                              p,
                              state.invariant_k,
                              lpt_value(state, params),
                              covered_call_value(spot, params.option(state.tau)),
                              arb.side,
                              arb.delta_in,
                              arb.lambda_out,
                              fees_cum};
        report.max_abs_k = std::max(report.max_abs_k, std::abs(state.invariant_k));
        report.records.push_back(rec);
    };

    record(0.0, path.prices.front(), ArbResult{});
    const double g = params.fee.gamma;
    for (std::int64_t i = 1; i <= steps; ++i) {
        double tau_i = tau0 - path.times[static_cast<std::size_t>(i)];
        if (tau_i < tau0 * 1e-12) tau_i = 0.0;
        state = make_state(state.reserves, params, tau_i);
        const double spot = path.prices[static_cast<std::size_t>(i)];
        ArbResult arb = arb_step(state, params, spot, rule);
        if (arb.side != ArbSide::None) {
            state = arb.new_state;
            const double fee_in = (1.0 - g) * arb.delta_in;
            fees_cum += (arb.side == ArbSide::Token1In) ? fee_in * spot : fee_in;
        }
        record(path.times[static_cast<std::size_t>(i)], spot, arb);
    }

    // Value the final holdings at the market price: at expiry the reported
    // price pins to the strike, which would overvalue Token1 when S_T < K.
    const double s_terminal = path.prices.back();
    report.terminal_lpt_value = s_terminal * state.reserves.r1 + state.reserves.r2;
    report.terminal_payoff = std::min(s_terminal, params.strike);
    report.total_fee_income = fees_cum;
    return report;
}

/// Convenience overload: simulate the external price as seeded GBM.
inline ReplicationReport run_replication(const Rmm01Params& params, const GbmParams& gbm,
                                         ArbRule rule = ArbRule::Boundary) {
    gbm.validate();
    return run_replication(params, gbm_path(gbm), rule);
}

/// Every stride-th point of a path, endpoints included. Runs on coupled
/// coarsenings of one fine path isolate time-discretization effects from
/// path sampling noise in convergence studies.
inline PricePath subsample_path(const PricePath& fine, std::int64_t stride) {
    if (stride < 1) throw DomainError("subsample_path: stride must be >= 1");
    const std::int64_t steps = static_cast<std::int64_t>(fine.times.size()) - 1;
    if (steps < 1 || steps % stride != 0)
        throw DomainError("subsample_path: stride must divide the step count");
    PricePath coarse;
    coarse.times.reserve(static_cast<std::size_t>(steps / stride) + 1);
    coarse.prices.reserve(static_cast<std::size_t>(steps / stride) + 1);
    for (std::int64_t i = 0; i <= steps; i += stride) {
        coarse.times.push_back(fine.times[static_cast<std::size_t>(i)]);
        coarse.prices.push_back(fine.prices[static_cast<std::size_t>(i)]);
    }
    return coarse;
}

struct ImpactRow {
    double r1;
    double tau;
    double sigma_sqrt_tau;
    double threshold;  ///< 2*phi(Phi^{-1}(1-R1))
    double uni_derivative;
    double rmm_derivative;
    bool rmm_dominates;
};

/// Analytic infinitesimal price impacts for RMM-01 and a Uniswap pool at
/// the same reported price, over a (tau, R1) grid.
inline std::vector<ImpactRow> run_impact_comparison(double strike, double sigma,
                                                    const std::vector<double>& tau_grid,
                                                    const std::vector<double>& r1_grid) {
    if (tau_grid.empty() || r1_grid.empty())
        throw DomainError("run_impact_comparison: grids must be nonempty");
    std::vector<ImpactRow> rows;
    rows.reserve(tau_grid.size() * r1_grid.size());
    Rmm01Params params{strike, sigma, 0.0, Fee{1.0}};
    for (double tau : tau_grid) {
        if (!(tau > 0.0)) throw DomainError("run_impact_comparison: tau grid must be positive");
        params.maturity = tau;
        for (double r1 : r1_grid) {
            const double vol = sigma * std::sqrt(tau);
            const double d = -normal_quantile(r1);
            const Reserves r{r1, strike * normal_cdf(d - vol)};
            const Rmm01State state = make_state(r, params, tau);
            const double p = reported_price(state, params);
            const double threshold = uniswap_dominance_bound(r1);
            const double uni = 2.0 * p;
            const double rmm = rmm_directional_price_derivative(state, params);
            rows.push_back({r1, tau, vol, threshold, uni, rmm, vol < threshold});
        }
    }
    return rows;
}

}  // namespace cfmm
