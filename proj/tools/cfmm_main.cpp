// cfmm: analysis CLI for the covered-call replicating market maker.
//
// Subcommands: price | swap | impact | manipulate | compare | replicate | synth
// Every subcommand reads a JSON scenario config and emits a deterministic CSV
// table to stdout or --out.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cfmm/black_scholes.hpp"
#include "cfmm/csv.hpp"
#include "cfmm/lending.hpp"
#include "cfmm/rmm01.hpp"
#include "cfmm/sim.hpp"
#include "cfmm/uniswap.hpp"

namespace {

using json = nlohmann::json;

constexpr int kExitConfig = 2;
constexpr int kExitDomain = 3;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ScenarioConfig {
    cfmm::Rmm01Params pool;
    double initial_price = 0.0;
    cfmm::GbmParams gbm{1.0, 0.0, 0.0, 1.0, 1, 0};
    bool has_gbm = false;
    std::vector<double> prices;
    std::vector<double> taus;
    std::vector<double> r1s;
    std::vector<double> swap_sizes;
    std::vector<double> epsilons;
    std::vector<double> collaterals;
};

double require_number(const json& j, const std::string& key) {
    if (!j.contains(key) || !j[key].is_number())
        throw ConfigError("config: missing or non-numeric field '" + key + "'");
    return j[key].get<double>();
}

std::vector<double> number_list(const json& j, const std::string& key,
                                std::vector<double> fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_array()) throw ConfigError("config: '" + key + "' must be an array");
    std::vector<double> out;
    for (const auto& v : j[key]) {
        if (!v.is_number()) throw ConfigError("config: '" + key + "' must hold numbers");
        out.push_back(v.get<double>());
    }
    if (out.empty()) throw ConfigError("config: '" + key + "' must be nonempty");
    return out;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: JSON parse error: ") + e.what());
    }
    if (!j.contains("pool")) throw ConfigError("config: missing 'pool' object");
    const json& pool = j["pool"];

    ScenarioConfig cfg;
    cfg.pool.strike = require_number(pool, "strike");
    cfg.pool.sigma = require_number(pool, "sigma");
    cfg.pool.maturity = require_number(pool, "maturity");
    cfg.pool.fee.gamma = pool.contains("gamma") ? require_number(pool, "gamma") : 1.0;
    cfg.initial_price = require_number(j, "initial_price");
    try {
        cfg.pool.validate();
        if (!(cfg.initial_price > 0.0))
            throw cfmm::DomainError("initial_price must be positive");
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }

    if (j.contains("gbm")) {
        const json& g = j["gbm"];
        cfg.gbm.s0 = cfg.initial_price;
        cfg.gbm.mu = g.contains("mu") ? require_number(g, "mu") : 0.0;
        cfg.gbm.sigma_path = g.contains("sigma") ? require_number(g, "sigma") : cfg.pool.sigma;
        cfg.gbm.dt = require_number(g, "dt");
        cfg.gbm.steps = static_cast<std::int64_t>(require_number(g, "steps"));
        cfg.gbm.seed = g.contains("seed")
                           ? static_cast<std::uint64_t>(g["seed"].get<double>())
                           : 0;
        try {
            cfg.gbm.validate();
        } catch (const std::exception& e) {
            throw ConfigError(std::string("config: gbm: ") + e.what());
        }
        cfg.has_gbm = true;
    }

    const json grids = j.contains("grids") ? j["grids"] : json::object();
    const double K = cfg.pool.strike;
    cfg.prices = number_list(grids, "prices", {0.5 * K, 0.8 * K, K, 1.25 * K, 2.0 * K});
    cfg.taus = number_list(grids, "tau", {cfg.pool.maturity});
    cfg.r1s = number_list(grids, "r1", {0.1, 0.25, 0.5, 0.75, 0.9});
    cfg.swap_sizes = number_list(grids, "swap_sizes", {0.01, 0.05, 0.1});
    cfg.epsilons = number_list(grids, "epsilons", {-0.1, -0.05, -0.01, 0.01, 0.05, 0.1});
    cfg.collaterals = number_list(grids, "collaterals", {0.9, 1.0});
    return cfg;
}

using cfmm::csv_double;
using cfmm::CsvWriter;

std::string side_name(cfmm::ArbSide side) {
    switch (side) {
        case cfmm::ArbSide::Token1In: return "token1";
        case cfmm::ArbSide::Token2In: return "token2";
        default: return "none";
    }
}

void cmd_price(const ScenarioConfig& cfg, std::ostream& out) {
    CsvWriter csv(out);
    csv.row({"S", "tau", "R1", "R2", "price", "lpt_value", "cc_value"});
    for (double tau : cfg.taus) {
        for (double spot : cfg.prices) {
            cfmm::Rmm01State state;
            if (tau > 0.0) {
                state = cfmm::state_from_price(spot, cfg.pool, tau);
            } else {
                // Expired pool: fully converted to the in-the-money side.
                cfmm::Reserves r = (spot > cfg.pool.strike)
                                       ? cfmm::Reserves{0.0, cfg.pool.strike}
                                       : cfmm::Reserves{1.0, 0.0};
                state = cfmm::make_state(r, cfg.pool, 0.0);
            }
            const double p = (tau > 0.0) ? cfmm::reported_price(state, cfg.pool)
                                         : cfg.pool.strike;
            csv.row({csv_double(spot), csv_double(tau), csv_double(state.reserves.r1),
                     csv_double(state.reserves.r2), csv_double(p),
                     csv_double(cfmm::lpt_value(state, cfg.pool)),
                     csv_double(cfmm::covered_call_value(spot, cfg.pool.option(tau)))});
        }
    }
}

void cmd_swap(const ScenarioConfig& cfg, std::ostream& out) {
    CsvWriter csv(out);
    csv.row({"pool", "side", "delta", "lambda", "new_price"});
    const double tau = cfg.pool.maturity;
    const auto state = cfmm::state_from_price(cfg.initial_price, cfg.pool, tau);
    const double p0 = cfmm::reported_price(state, cfg.pool);
    cfmm::UniPool uni{{1.0, p0}, cfg.pool.fee};
    for (double size : cfg.swap_sizes) {
        const auto q1 = cfmm::swap_exact_token1_in(state, cfg.pool, size);
        csv.row({"rmm01", "token1_in", csv_double(size), csv_double(q1.lambda),
                 csv_double(q1.new_price)});
        const double delta2 = size * cfg.pool.strike;
        const auto q2 = cfmm::swap_exact_token2_in(state, cfg.pool, delta2);
        csv.row({"rmm01", "token2_in", csv_double(delta2), csv_double(q2.lambda),
                 csv_double(q2.new_price)});
        const double lam2 = cfmm::uni_swap_out(uni, size);
        const double g = cfg.pool.fee.gamma;
        const double uni_new_price =
            (uni.reserves.r2 - lam2) / (uni.reserves.r1 + g * size);
        csv.row({"uniswap", "token1_in", csv_double(size), csv_double(lam2),
                 csv_double(uni_new_price)});
    }
}

void cmd_impact(const ScenarioConfig& cfg, std::ostream& out) {
    CsvWriter csv(out);
    csv.row({"pool", "kind", "delta1", "value"});
    const double tau = cfg.pool.maturity;
    const auto state = cfmm::state_from_price(cfg.initial_price, cfg.pool, tau);
    const double p0 = cfmm::reported_price(state, cfg.pool);
    cfmm::UniPool uni{{1.0, p0}, cfg.pool.fee};
    for (double size : cfg.swap_sizes) {
        csv.row({"uniswap", "price_impact", csv_double(size),
                 csv_double(cfmm::uni_price_impact(uni, size))});
    }
    csv.row({"uniswap", "directional_derivative", csv_double(0.0),
             csv_double(cfmm::uni_directional_price_derivative(uni))});
    csv.row({"rmm01", "directional_derivative", csv_double(0.0),
             csv_double(cfmm::rmm_directional_price_derivative(state, cfg.pool))});
}

void cmd_manipulate(const ScenarioConfig& cfg, std::ostream& out) {
    CsvWriter csv(out);
    csv.row({"epsilon", "side", "delta", "achieved_price", "target_price", "cost_token2"});
    const double tau = cfg.pool.maturity;
    const auto state = cfmm::state_from_price(cfg.initial_price, cfg.pool, tau);
    const double p0 = cfmm::reported_price(state, cfg.pool);
    for (double eps : cfg.epsilons) {
        const double target = (1.0 + eps) * p0;
        if (eps == 0.0) {
            csv.row({csv_double(eps), "none", csv_double(0.0), csv_double(p0),
                     csv_double(target), csv_double(0.0)});
        } else if (eps < 0.0) {
            const double d1 = cfmm::manipulation_delta1(state, cfg.pool, eps);
            const auto q = cfmm::swap_exact_token1_in(state, cfg.pool, d1);
            csv.row({csv_double(eps), "token1", csv_double(d1), csv_double(q.new_price),
                     csv_double(target), csv_double(d1 * p0 - q.lambda)});
        } else {
            const double d2 = cfmm::manipulation_delta2(state, cfg.pool, eps);
            const auto q = cfmm::swap_exact_token2_in(state, cfg.pool, d2);
            csv.row({csv_double(eps), "token2", csv_double(d2), csv_double(q.new_price),
                     csv_double(target), csv_double(d2 - q.lambda * p0)});
        }
    }
}

void cmd_compare(const ScenarioConfig& cfg, std::ostream& out) {
    CsvWriter csv(out);
    csv.row({"r1", "threshold", "sigma_sqrt_tau", "dominates"});
    const auto rows =
        cfmm::run_impact_comparison(cfg.pool.strike, cfg.pool.sigma, cfg.taus, cfg.r1s);
    for (const auto& row : rows) {
        csv.row({csv_double(row.r1), csv_double(row.threshold),
                 csv_double(row.sigma_sqrt_tau), row.rmm_dominates ? "1" : "0"});
    }
}

void cmd_replicate(const ScenarioConfig& cfg, std::ostream& out, cfmm::ArbRule rule) {
    if (!cfg.has_gbm) throw ConfigError("config: 'gbm' section required for replicate");
    CsvWriter csv(out);
    csv.row({"t", "tau", "S", "p", "k", "lpt_value", "cc_value", "arb_side", "arb_in",
             "arb_out", "fees_cum"});
    const auto report = cfmm::run_replication(cfg.pool, cfg.gbm, rule);
    for (const auto& rec : report.records) {
        csv.row({csv_double(rec.t), csv_double(rec.tau), csv_double(rec.spot),
                 csv_double(rec.price), csv_double(rec.invariant_k),
                 csv_double(rec.lpt_value), csv_double(rec.cc_value),
                 side_name(rec.arb_side), csv_double(rec.arb_in), csv_double(rec.arb_out),
                 csv_double(rec.fees_cum)});
    }
}

void cmd_synth(const ScenarioConfig& cfg, std::ostream& out) {
    CsvWriter csv(out);
    csv.row({"kind", "S", "tau", "x", "y", "exposure", "value_unadjusted",
             "value_adjusted", "gap", "never_liquidated"});
    for (double tau : cfg.taus) {
        if (!(tau > 0.0)) continue;
        const auto params = cfg.pool.option(tau);
        for (double spot : cfg.prices) {
            for (double y : cfg.collaterals) {
                const auto pos = cfmm::enter_synthetic_call(spot, params, y);
                const auto val = cfmm::value_synthetic_call(pos, spot, tau);
                const double call = cfmm::call_value(spot, params);
                const bool never = y >= 1.0;
                csv.row({"call", csv_double(spot), csv_double(tau), csv_double(pos.x),
                         csv_double(y), csv_double(pos.x + y),
                         csv_double(val.unadjusted), csv_double(val.adjusted),
                         csv_double(call - val.unadjusted), never ? "1" : "0"});
                const auto put = cfmm::enter_synthetic_put(spot, params,
                                                           y * cfg.pool.strike);
                const auto pval = cfmm::value_synthetic_put(put, spot, tau);
                csv.row({"put", csv_double(spot), csv_double(tau), csv_double(put.x2),
                         csv_double(put.y2), csv_double(put.leg_sum()),
                         csv_double(pval.value - pval.offset), csv_double(pval.value),
                         csv_double(pval.offset), put.y2 >= cfg.pool.strike ? "1" : "0"});
            }
        }
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Covered-call replicating market maker analysis"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    std::optional<std::uint64_t> seed_override;
    bool paper_epsilon_rule = false;
    app.add_option("--config", config_path, "Scenario config (JSON)")->required();
    app.add_option("--out", out_path, "Output CSV path (default stdout)");
    app.add_option("--seed", seed_override, "Override the config RNG seed");
    app.add_flag("--paper-epsilon-rule", paper_epsilon_rule,
                 "Use the literal epsilon arbitrage rule");

    const std::vector<std::pair<std::string, std::string>> names = {
        {"price", "Reported price, reserves, and LP token value over a price grid"},
        {"swap", "Swap quotes over a size grid, both directions"},
        {"impact", "Analytic price-impact comparison vs a constant-product pool"},
        {"manipulate", "Price-manipulation trade sizes and costs over an epsilon grid"},
        {"compare", "Dominance-threshold table over a (tau, R1) grid"},
        {"replicate", "Seeded covered-call replication run along a GBM path"},
        {"synth", "Synthetic-call positions and liquidation checks over a collateral grid"}};
    for (const auto& [name, desc] : names) app.add_subcommand(name, desc)->fallthrough();

    CLI11_PARSE(app, argc, argv);
    const std::string cmd = app.get_subcommands().front()->get_name();

    try {
        ScenarioConfig cfg = load_config(config_path);
        if (seed_override) cfg.gbm.seed = *seed_override;

        std::ostringstream buffer;
        const cfmm::ArbRule rule =
            paper_epsilon_rule ? cfmm::ArbRule::PaperEpsilon : cfmm::ArbRule::Boundary;
        if (cmd == "price") cmd_price(cfg, buffer);
        else if (cmd == "swap") cmd_swap(cfg, buffer);
        else if (cmd == "impact") cmd_impact(cfg, buffer);
        else if (cmd == "manipulate") cmd_manipulate(cfg, buffer);
        else if (cmd == "compare") cmd_compare(cfg, buffer);
        else if (cmd == "replicate") cmd_replicate(cfg, buffer, rule);
        else if (cmd == "synth") cmd_synth(cfg, buffer);

        if (out_path.empty()) {
            std::cout << buffer.str();
        } else {
            std::ofstream out(out_path, std::ios::binary);
            if (!out) {
                std::cerr << "error: cannot open output file " << out_path << "\n";
                return kExitConfig;
            }
            out << buffer.str();
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDomain;
    }
    return 0;
}
