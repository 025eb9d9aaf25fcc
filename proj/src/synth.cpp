#include "asiaudit/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <nlohmann/json.hpp>

#include "asiaudit/errors.hpp"
#include "asiaudit/numeric.hpp"
#include "asiaudit/prep.hpp"

namespace asiaudit {

double SplitMix64::normal01() {
    const double u1 = uniform01();  // (0, 1], so log(u1) is finite
    const double u2 = uniform01();
    constexpr double two_pi = 6.283185307179586476925286766559;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index) {
    SplitMix64 mixer(master ^ (0x9E3779B97F4A7C15ull * (index + 1)));
    return mixer.next();
}

const char* to_string(RestMode mode) {
    switch (mode) {
    case RestMode::zero: return "zero";
    case RestMode::all_positive: return "all_positive";
    case RestMode::all_negative_small: return "all_negative_small";
    case RestMode::all_negative_large: return "all_negative_large";
    case RestMode::mixed: return "mixed";
    }
    return "?";
}

RestMode rest_mode_from_string(const std::string& name) {
    if (name == "zero")
        return RestMode::zero;
    if (name == "all_positive")
        return RestMode::all_positive;
    if (name == "all_negative_small")
        return RestMode::all_negative_small;
    if (name == "all_negative_large")
        return RestMode::all_negative_large;
    if (name == "mixed")
        return RestMode::mixed;
    throw ConfigError("unknown rest_mode: " + name);
}

void SimulationConfig::validate() const {
    if (n_firms < 1)
        throw ConfigError("n_firms must be >= 1");
    if (n_years < 2)
        throw ConfigError("n_years must be >= 2 (flows need two balance-sheet dates)");
    if (n_firms * (n_years - 1) < 10)
        throw ConfigError("n_firms * (n_years - 1) must be >= 10 for a usable panel");
    if (!(cf_location > 0.0))
        throw ConfigError("cf_location must be positive");
    if (!(cf_spread >= 0.0))
        throw ConfigError("cf_spread must be >= 0");
    if (!(rest_scale >= 0.0))
        throw ConfigError("rest_scale must be >= 0");
    if ((rest_mode == RestMode::all_positive ||
         rest_mode == RestMode::all_negative_large) &&
        !(rest_scale > 0.0))
        throw ConfigError(std::string("rest_mode ") + to_string(rest_mode) +
                          " requires rest_scale > 0");
    if (rest_mode == RestMode::mixed &&
        !(mix_fraction > 0.0 && mix_fraction < 1.0))
        throw ConfigError("mix_fraction must lie in (0, 1) for mixed mode");
    if (!(base_assets_location > 0.0))
        throw ConfigError("base_assets_location must be positive");
}

nlohmann::json SimulationConfig::to_json() const {
    nlohmann::ordered_json j;
    j["n_firms"] = n_firms;
    j["n_years"] = n_years;
    j["seed"] = seed;
    j["cf_location"] = cf_location;
    j["cf_spread"] = cf_spread;
    j["rest_mode"] = to_string(rest_mode);
    j["rest_scale"] = rest_scale;
    j["mix_fraction"] = mix_fraction;
    j["base_assets_location"] = base_assets_location;
    j["label"] = label;
    return j;
}

SimulationConfig SimulationConfig::from_json(const nlohmann::json& j) {
    SimulationConfig c;
    if (j.contains("n_firms"))
        c.n_firms = j.at("n_firms").get<long long>();
    if (j.contains("n_years"))
        c.n_years = j.at("n_years").get<long long>();
    if (j.contains("seed"))
        c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("cf_location"))
        c.cf_location = j.at("cf_location").get<double>();
    if (j.contains("cf_spread"))
        c.cf_spread = j.at("cf_spread").get<double>();
    if (j.contains("rest_mode"))
        c.rest_mode = rest_mode_from_string(j.at("rest_mode").get<std::string>());
    if (j.contains("rest_scale"))
        c.rest_scale = j.at("rest_scale").get<double>();
    if (j.contains("mix_fraction"))
        c.mix_fraction = j.at("mix_fraction").get<double>();
    if (j.contains("base_assets_location"))
        c.base_assets_location = j.at("base_assets_location").get<double>();
    if (j.contains("label"))
        c.label = j.at("label").get<std::string>();
    c.validate();
    return c;
}

namespace {

std::string firm_label(long long index, int width) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "F%0*lld", std::min(width, 19), index);
    return buf;
}

double draw_rest_scaled(SplitMix64& rng, const SimulationConfig& cfg, double cf) {
    switch (cfg.rest_mode) {
    case RestMode::zero:
        return 0.0;
    case RestMode::all_positive:
        return cf * cfg.rest_scale * rng.uniform01();
    case RestMode::all_negative_small:
        return -cf * rng.uniform_open01();
    case RestMode::all_negative_large:
        return -cf * (1.0 + cfg.rest_scale * rng.uniform01());
    case RestMode::mixed: {
        const bool positive = rng.uniform01() <= cfg.mix_fraction;
        const double magnitude = cf * cfg.rest_scale * rng.uniform01();
        return positive ? magnitude : -magnitude;
    }
    }
    return 0.0;
}

} // namespace

Panel simulate_panel(const SimulationConfig& config) {
    config.validate();

    Panel panel;
    panel.schema_mode = SchemaMode::flow;
    panel.provenance = config.label.empty()
                           ? std::string("synthetic-") + to_string(config.rest_mode) +
                                 "-seed" + std::to_string(config.seed)
                           : config.label;

    int id_width = 1;
    for (long long v = config.n_firms; v >= 10; v /= 10)
        ++id_width;

    panel.records.reserve(
        static_cast<std::size_t>(config.n_firms * (config.n_years - 1)));

    for (long long f = 0; f < config.n_firms; ++f) {
        SplitMix64 rng(substream_seed(config.seed, static_cast<std::uint64_t>(f)));
        const std::string firm = firm_label(f + 1, id_width);

        double assets = config.base_assets_location * std::exp(0.25 * rng.normal01());

        for (long long t = 1; t < config.n_years; ++t) {
            double cf_scaled =
                config.cf_location * std::exp(config.cf_spread * rng.normal01());
            double rest_scaled = draw_rest_scaled(rng, config, cf_scaled);

            // keep total assets positive; scaled dTA is cf + 0.8 * rest
            while (cf_scaled + 0.8 * rest_scaled <= -0.95) {
                cf_scaled *= 0.5;
                rest_scaled *= 0.5;
            }

            FirmYearRecord rec;
            rec.firm_id = firm;
            rec.year = 2000 + static_cast<int>(t);
            rec.cash_flow = cf_scaled * assets;
            const double rest = rest_scaled * assets;
            rec.investment = rec.cash_flow + rest;

            // split rest across the identity components with fixed weights;
            // the last component closes the sum exactly
            const double d_ltd = 0.40 * rest;
            const double d_cs = 0.20 * rest;
            const double dep = -0.15 * rest;
            const double div = -0.05 * rest;
            const double d_wc = -0.15 * rest;
            const double partial = d_ltd + d_cs - dep - div - d_wc;
            const double d_ofa = partial - rest;
            rec.d_ltd = d_ltd;
            rec.d_capital_stock = d_cs;
            rec.depreciation = dep;
            rec.dividends = div;
            rec.d_working_capital = d_wc;
            rec.d_ofa = d_ofa;

            const double d_total_assets = rec.investment + d_wc + d_ofa;
            const double d_total_funds = rec.cash_flow + d_ltd + d_cs - dep - div;
            rec.d_total_assets = d_total_assets;
            rec.d_total_funds = d_total_funds;

            assets += d_total_assets;
            rec.total_assets = assets;
            panel.records.push_back(std::move(rec));
        }
    }
    return panel;
}

double expected_origin_slope(const Panel& panel) {
    if (panel.schema_mode != SchemaMode::flow)
        throw ConfigError("expected_origin_slope requires a flow-mode panel");
    CompensatedSum num, den;
    for (const auto& r : panel.records) {
        if (r.cash_flow == 0.0)
            throw DomainError("expected_origin_slope requires cash_flow != 0 (" +
                              r.firm_id + ", " + std::to_string(r.year) + ")");
        const double rest = r.investment - r.cash_flow;
        num.add(r.cash_flow * rest);
        den.add(r.cash_flow * r.cash_flow);
    }
    if (den.value() == 0.0)
        throw ZeroDenominatorError("sum of squared cash flows is zero");
    return 1.0 + num.value() / den.value();
}

} // namespace asiaudit
