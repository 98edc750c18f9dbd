#include <doctest.h>

#include <cmath>

#include "cfmm/black_scholes.hpp"
#include "cfmm/normal.hpp"
#include "cfmm/rmm01.hpp"
#include "support.hpp"

using namespace cfmm;

namespace {
Rmm01Params params_k2{2.0, 1.0, 1.0, Fee{1.0}};

Rmm01State on_curve_state(double r1, const Rmm01Params& p, double tau) {
    const double vol = p.sigma * std::sqrt(tau);
    const Reserves r{r1, p.strike * normal_cdf(-normal_quantile(r1) - vol)};
    return make_state(r, p, tau);
}
}  // namespace

TEST_CASE("trading_function") {
    const double r2 = 2.0 * normal_cdf(-1.0);
    CHECK(std::abs(rmm01_trading_function({0.5, r2}, params_k2, 1.0)) <= 1e-15);

    // Expiry reduces to the constant sum K*R1 + R2 = K.
    CHECK(rmm01_trading_function({0.25, 1.5}, params_k2, 0.0) == 0.0);

    // On-curve construction with the cdf oracle; R2 frozen at high precision.
    const Rmm01Params big{2000.0, 0.8, 0.25, Fee{1.0}};
    CHECK(std::abs(rmm01_trading_function({0.3, 1099.0018325799402}, big, 0.25)) <= 1e-12 * 2000.0);

    // Closed-boundary limits of the Gaussian term (1 and 0 respectively).
    CHECK(rmm01_trading_function({0.0, 1.0}, params_k2, 1.0) == -1.0);
    CHECK(rmm01_trading_function({1.0, 1.0}, params_k2, 1.0) == 1.0);
    CHECK_THROWS_AS(rmm01_trading_function({1.5, 1.0}, params_k2, 1.0), DomainError);
    CHECK_THROWS_AS(rmm01_trading_function({-0.1, 1.0}, params_k2, 1.0), DomainError);
}

TEST_CASE("reported_price") {
    const auto mid = on_curve_state(0.5, params_k2, 1.0);
    CHECK(reported_price(mid, params_k2) ==
          doctest::Approx(2.0 * std::exp(-0.5)).epsilon(1e-14));

    // Price is exactly K at expiry for any constant-sum point.
    const auto expired = make_state({0.25, 1.5}, params_k2, 0.0);
    CHECK(reported_price(expired, params_k2) == 2.0);

    // Gradient-ratio identity, frozen value.
    const Rmm01Params big{2000.0, 0.8, 0.25, Fee{1.0}};
    const auto s = on_curve_state(0.3, big, 0.25);
    CHECK(reported_price(s, big) == doctest::Approx(2277.1106616136458).epsilon(1e-12));
}

TEST_CASE("price equals the Gaussian pdf ratio") {
    testsupport::Rng rng(17);
    for (int i = 0; i < 1000; ++i) {
        const Rmm01Params p{rng.uniform(100.0, 4000.0), rng.uniform(0.2, 1.5), 1.0, Fee{1.0}};
        const double tau = rng.uniform(0.02, 2.0);
        const auto state = on_curve_state(rng.uniform(0.02, 0.98), p, tau);
        const double d = -normal_quantile(state.reserves.r1);
        const double vol = p.sigma * std::sqrt(tau);
        const double ratio = p.strike * normal_pdf(d - vol) / normal_pdf(d);
        CHECK(reported_price(state, p) == doctest::Approx(ratio).epsilon(1e-10));
    }
}

TEST_CASE("reserves_from_price") {
    SUBCASE("at the money") {
        const Rmm01Params p{1500.0, 0.6, 1.0, Fee{1.0}};
        const double vol = 0.6;
        const auto r = reserves_from_price(1500.0, p, 1.0);
        CHECK(r.r1 == doctest::Approx(normal_cdf(-vol / 2.0)).epsilon(1e-14));
        CHECK(r.r2 == doctest::Approx(1500.0 * normal_cdf(-vol / 2.0)).epsilon(1e-14));
        CHECK(p.strike * r.r1 + r.r2 < p.strike);
    }
    SUBCASE("frozen worked setup") {
        const Rmm01Params p{1100.0, 0.8, 0.25, Fee{1.0}};
        const auto r = reserves_from_price(1000.0, p, 0.25);
        CHECK(r.r1 == doctest::Approx(0.51526596755431115).epsilon(1e-12));
        CHECK(r.r2 == doctest::Approx(363.65264126724893).epsilon(1e-12));
    }
    SUBCASE("round trip over a price grid") {
        const Rmm01Params p{1100.0, 0.8, 0.25, Fee{1.0}};
        for (double m = 0.2; m <= 5.0; m += 0.2) {
            const double spot = m * p.strike;
            const auto state = state_from_price(spot, p, 0.25);
            CHECK(reported_price(state, p) == doctest::Approx(spot).epsilon(1e-9));
        }
    }
    SUBCASE("deep out-of-the-money corner where R1 rounds to one") {
        const Rmm01Params p{2000.0, 0.05, 1.0, Fee{1.0}};
        const double spot = 0.2 * p.strike;
        const auto state = state_from_price(spot, p, 1.0);
        CHECK(state.reserves.r1 == 1.0);
        CHECK(state.reserves.r2 > 0.0);
        CHECK(reported_price(state, p) == doctest::Approx(spot).epsilon(1e-9));
    }
    CHECK_THROWS_AS(reserves_from_price(1000.0, params_k2, 0.0), DomainError);
}

TEST_CASE("lpt_value") {
    CHECK(lpt_value(make_state({0.0, 2.0}, params_k2, 0.0), params_k2) == 2.0);
    CHECK(lpt_value(make_state({1.0, 0.0}, params_k2, 0.0), params_k2) == 2.0);

    const Rmm01Params p{2000.0, 0.8, 0.25, Fee{1.0}};
    const auto state = state_from_price(2000.0, p, 0.25);
    const double vcc = covered_call_value(2000.0, p.option(0.25));
    CHECK(std::abs(lpt_value(state, p) - vcc) <= 1e-9 * p.strike);
}

TEST_CASE("swap closed forms match the bisection oracle") {
    SUBCASE("worked example") {
        const auto state = on_curve_state(0.5, params_k2, 1.0);
        const auto quote = swap_exact_token1_in(state, params_k2, 0.1);
        const Rmm01Curve curve{2.0, 1.0, 1.0};
        const double oracle = testsupport::bisect_lambda2(curve, state.reserves, 0.1);
        CHECK(quote.lambda == doctest::Approx(oracle).epsilon(1e-10));
        CHECK(quote.new_price < reported_price(state, params_k2));
        CHECK(reported_price(quote.new_state, params_k2) ==
              doctest::Approx(quote.new_price).epsilon(1e-9));
    }
    SUBCASE("random states, both directions, with and without fee") {
        testsupport::Rng rng(23);
        for (int i = 0; i < 1000; ++i) {
            Rmm01Params p{rng.uniform(500.0, 3000.0), rng.uniform(0.3, 1.2), 1.0,
                          Fee{rng.uniform(0.98, 1.0)}};
            const double tau = rng.uniform(0.05, 1.5);
            const double r1 = rng.uniform(0.1, 0.9);
            auto state = on_curve_state(r1, p, tau);
            // Half the cases first run a fee swap so the closed forms are
            // exercised on grown-invariant (k > 0) states too.
            if (i % 2 == 0) {
                Rmm01Params feep = p;
                feep.fee.gamma = 0.98;
                state = swap_exact_token1_in(state, feep,
                                             0.1 * (1.0 - state.reserves.r1))
                            .new_state;
                CHECK(state.invariant_k > 0.0);
            }
            const Rmm01Curve curve{p.strike, p.sigma, state.tau};
            const double level = std::max(curve.evaluate(state.reserves), 0.0);
            const double g = p.fee.gamma;
            const double delta1 =
                rng.uniform(1e-4, 0.8 * (1.0 - state.reserves.r1));
            const auto q1 = swap_exact_token1_in(state, p, delta1);
            const double o1 = testsupport::bisect_lambda2(curve, state.reserves,
                                                          g * delta1, level);
            CHECK(q1.lambda == doctest::Approx(o1).epsilon(1e-10));

            const double delta2 = rng.uniform(1e-4, 0.5) * p.strike *
                                  (1.0 - (state.reserves.r2 - state.invariant_k) / p.strike);
            const auto q2 = swap_exact_token2_in(state, p, delta2);
            const double o2 = testsupport::bisect_lambda1(curve, state.reserves,
                                                          g * delta2, level);
            CHECK(q2.lambda == doctest::Approx(o2).epsilon(1e-10));
        }
    }
}

TEST_CASE("swap marginal rates and invariants") {
    const Rmm01Params p{2.0, 1.0, 1.0, Fee{0.997}};
    const auto state = on_curve_state(0.4, p, 1.0);
    const double spot = reported_price(state, p);
    const double tiny = 1e-8;

    CHECK(swap_exact_token1_in(state, p, tiny).lambda / tiny ==
          doctest::Approx(0.997 * spot).epsilon(1e-6));
    CHECK(swap_exact_token2_in(state, p, tiny).lambda / tiny ==
          doctest::Approx(0.997 / spot).epsilon(1e-6));

    SUBCASE("fee-free swaps preserve the invariant") {
        const Rmm01Params nofee{2.0, 1.0, 1.0, Fee{1.0}};
        const auto s0 = on_curve_state(0.4, nofee, 1.0);
        const auto q = swap_exact_token1_in(s0, nofee, 0.2);
        CHECK(std::abs(q.new_state.invariant_k - s0.invariant_k) <= 1e-12 * nofee.strike);
    }
    SUBCASE("fee swaps grow the invariant") {
        const auto q = swap_exact_token1_in(state, p, 0.2);
        CHECK(q.new_state.invariant_k > state.invariant_k);
    }
    SUBCASE("price moves in the right direction") {
        const auto q1 = swap_exact_token1_in(state, p, 0.1);
        CHECK(q1.new_price < spot);
        const auto q2 = swap_exact_token2_in(state, p, 0.1);
        CHECK(q2.new_price > spot);
    }
    SUBCASE("exhausting the Token1 side is rejected") {
        CHECK_THROWS_AS(swap_exact_token1_in(state, p, 0.61), LiquidityError);
    }
}

TEST_CASE("expiry swaps trade at the strike") {
    const Rmm01Params p{2.0, 1.0, 1.0, Fee{0.997}};
    const auto state = make_state({0.25, 1.5}, p, 0.0);
    const auto q1 = swap_exact_token1_in(state, p, 0.1);
    CHECK(q1.lambda == doctest::Approx(0.997 * 2.0 * 0.1).epsilon(1e-15));
    CHECK(q1.new_price == 2.0);
    const auto q2 = swap_exact_token2_in(state, p, 0.1);
    CHECK(q2.lambda == doctest::Approx(0.997 * 0.1 / 2.0).epsilon(1e-15));
    CHECK(q2.new_price == 2.0);
}

TEST_CASE("manipulation deltas") {
    CHECK(manipulation_delta1(on_curve_state(0.5, params_k2, 1.0), params_k2, 0.0) == 0.0);
    CHECK(manipulation_delta2(on_curve_state(0.5, params_k2, 1.0), params_k2, 0.0) == 0.0);

    SUBCASE("round trips hit the target price") {
        testsupport::Rng rng(31);
        for (double gamma : {1.0, 0.997, 0.99}) {
            Rmm01Params p{2.0, 1.0, 1.0, Fee{gamma}};
            for (double eps : {-0.2, -0.1, -0.05, -0.01, 0.01, 0.05, 0.1, 0.2}) {
                const auto state = on_curve_state(rng.uniform(0.3, 0.7), p, 1.0);
                const double p0 = reported_price(state, p);
                double achieved;
                if (eps < 0.0) {
                    const double d1 = manipulation_delta1(state, p, eps);
                    achieved = swap_exact_token1_in(state, p, d1).new_price;
                } else {
                    const double d2 = manipulation_delta2(state, p, eps);
                    achieved = swap_exact_token2_in(state, p, d2).new_price;
                }
                CHECK(achieved == doctest::Approx((1.0 + eps) * p0).epsilon(1e-9));
            }
        }
    }
    SUBCASE("direction is enforced") {
        const auto state = on_curve_state(0.5, params_k2, 1.0);
        CHECK_THROWS_AS(manipulation_delta1(state, params_k2, 0.05), WrongDirectionError);
        CHECK_THROWS_AS(manipulation_delta2(state, params_k2, -0.05), WrongDirectionError);
        CHECK_THROWS_AS(manipulation_delta1(state, params_k2, -1.0), DomainError);
    }
    SUBCASE("cost scales linearly with pool size") {
        // Deltas are per LPT; a pool of N LPTs needs N times the basket.
        const auto state = on_curve_state(0.5, params_k2, 1.0);
        const double per_lpt = manipulation_delta1(state, params_k2, -0.05);
        const Rmm01Pool pool{state, 25.0};
        CHECK(pool.lpt_supply * per_lpt == doctest::Approx(25.0 * per_lpt).epsilon(1e-15));
    }
    SUBCASE("gamma scales the required basket") {
        const auto state = on_curve_state(0.5, params_k2, 1.0);
        Rmm01Params fee = params_k2;
        fee.fee.gamma = 0.997;
        CHECK(manipulation_delta1(state, fee, -0.05) ==
              doctest::Approx(manipulation_delta1(state, params_k2, -0.05) / 0.997)
                  .epsilon(1e-14));
    }
}

TEST_CASE("directional price derivative") {
    const auto mid = on_curve_state(0.5, params_k2, 1.0);
    const double p0 = reported_price(mid, params_k2);
    CHECK(rmm_directional_price_derivative(mid, params_k2) ==
          doctest::Approx(p0 * std::sqrt(2.0 * M_PI)).epsilon(1e-13));

    SUBCASE("vanishes at expiry") {
        CHECK(rmm_directional_price_derivative(make_state({0.3, 1.4}, params_k2, 0.0),
                                               params_k2) == 0.0);
        // and decays with tau
        double prev = rmm_directional_price_derivative(on_curve_state(0.5, params_k2, 1.0),
                                                       params_k2);
        for (double tau : {0.5, 0.1, 0.01}) {
            const double v = rmm_directional_price_derivative(
                on_curve_state(0.5, params_k2, tau), params_k2);
            CHECK(v < prev);
            prev = v;
        }
    }
    SUBCASE("matches the finite difference along the invariant tangent") {
        testsupport::Rng rng(37);
        for (int i = 0; i < 300; ++i) {
            const Rmm01Params p{rng.uniform(100.0, 3000.0), rng.uniform(0.3, 1.2), 1.0,
                                Fee{1.0}};
            const double tau = rng.uniform(0.05, 1.5);
            const double r1 = rng.uniform(0.1, 0.9);
            // Tangent J*P = (-1, p): the price only depends on R1.
            auto price_at = [&](double r1v) {
                return reported_price(on_curve_state(r1v, p, tau), p);
            };
            const double fd = -testsupport::central_diff(price_at, r1, 1e-7);
            const double analytic =
                rmm_directional_price_derivative(on_curve_state(r1, p, tau), p);
            CHECK(std::abs(fd - analytic) <= 1e-7 * analytic);
        }
    }
}

TEST_CASE("uniswap dominance bound") {
    CHECK(uniswap_dominance_bound(0.5) == doctest::Approx(0.7978845608028654).epsilon(1e-12));
    CHECK(uniswap_dominance_bound(1e-6) < 1e-4);
    CHECK(uniswap_dominance_bound(1.0 - 1e-6) < 1e-4);
    CHECK_THROWS_AS(uniswap_dominance_bound(0.0), DomainError);
    CHECK_THROWS_AS(uniswap_dominance_bound(1.0), DomainError);
    // Symmetric about one half.
    CHECK(uniswap_dominance_bound(0.3) ==
          doctest::Approx(uniswap_dominance_bound(0.7)).epsilon(1e-12));
}

TEST_CASE("advance_time") {
    const auto state = on_curve_state(0.4, params_k2, 1.0);
    SUBCASE("dt = 0 is the identity") {
        const auto same = advance_time(state, params_k2, 0.0);
        CHECK(same.reserves.r1 == state.reserves.r1);
        CHECK(same.reserves.r2 == state.reserves.r2);
        CHECK(same.tau == state.tau);
        CHECK(same.invariant_k == state.invariant_k);
    }
    SUBCASE("decay past expiry floors at zero") {
        const auto done = advance_time(state, params_k2, 5.0);
        CHECK(done.tau == 0.0);
        CHECK(reported_price(done, params_k2) == params_k2.strike);
    }
    SUBCASE("k drift matches direct re-evaluation") {
        const auto later = advance_time(state, params_k2, 0.25);
        CHECK(later.invariant_k ==
              rmm01_trading_function(state.reserves, params_k2, 0.75));
        CHECK(later.invariant_k != state.invariant_k);
    }
}

TEST_CASE("pool wrapper liquidity changes") {
    Rmm01Pool pool{on_curve_state(0.4, params_k2, 1.0), 10.0};
    const Reserves per_lpt = pool.state.reserves;
    const double minted = pool.add_liquidity({2.0 * per_lpt.r1, 2.0 * per_lpt.r2});
    CHECK(minted == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(pool.lpt_supply == doctest::Approx(12.0).epsilon(1e-12));
    CHECK_THROWS_AS(pool.add_liquidity({per_lpt.r1, 3.0 * per_lpt.r2}),
                    InvalidLiquidityError);
    const Basket out = pool.remove_liquidity(2.0);
    CHECK(out.a1 == doctest::Approx(2.0 * per_lpt.r1).epsilon(1e-12));
    CHECK_THROWS_AS(pool.remove_liquidity(100.0), LiquidityError);
}
