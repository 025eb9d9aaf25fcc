#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "asiaudit/panel.hpp"

namespace asiaudit {

/// Deterministic 64-bit generator (SplitMix64). Used directly as the draw
/// source; the output sequence depends only on the seed, not on platform
/// library state.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform in (0, 1].
    double uniform01() { return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53; }

    /// Uniform in (0, 1), both endpoints excluded.
    double uniform_open01() {
        return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal via Box–Muller (one value per two uniforms).
    double normal01();

private:
    std::uint64_t state_;
};

/// Substream seed for stream `index` under `master`: one SplitMix64 step of
/// a mixed key, so firm streams are independent and order-free.
std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index);

enum class RestMode { zero, all_positive, all_negative_small, all_negative_large, mixed };

const char* to_string(RestMode mode);
RestMode rest_mode_from_string(const std::string& name);  // throws ConfigError

/// Specification of a synthetic firm-year panel. Cash flow is drawn from a
/// log-space normal (median cf_location, log-sd cf_spread) in
/// assets-scaled units; rest is drawn per rest_mode relative to the same
/// period's cash flow:
///   zero               -> 0
///   all_positive       -> +cf * rest_scale * u,        u in (0, 1]
///   all_negative_small -> -cf * u,                     u in (0, 1)
///   all_negative_large -> -cf * (1 + rest_scale * u),  u in (0, 1]
///   mixed              -> +/- cf * rest_scale * u, positive with
///                         probability mix_fraction
struct SimulationConfig {
    long long n_firms = 100;
    long long n_years = 5;  // balance-sheet dates; yields n_years - 1 flow records
    std::uint64_t seed = 0;
    double cf_location = 0.10;
    double cf_spread = 0.5;
    RestMode rest_mode = RestMode::mixed;
    double rest_scale = 0.5;
    double mix_fraction = 0.5;
    double base_assets_location = 1000.0;
    std::string label;

    void validate() const;  // throws ConfigError

    nlohmann::json to_json() const;
    static SimulationConfig from_json(const nlohmann::json& j);
};

/// Generates a flow-mode panel satisfying the full accounting identity
/// exactly: investment = cash_flow + rest per record, rest split across the
/// six identity components with fixed weights (d_ltd 40%, d_capital_stock
/// 20%, depreciation -15%, dividends -5%, d_working_capital -15%, d_ofa
/// -5%, the last component closing the sum exactly), and
/// d_total_assets = investment + d_working_capital + d_ofa matching
/// d_total_funds = cash_flow + funds-side components. Firms draw from
/// independent substreams; output ordering is (firm, year); a given seed
/// reproduces the panel bit for bit.
Panel simulate_panel(const SimulationConfig& config);

/// Closed-form through-origin slope on the panel's money values:
/// 1 + sum(cf * rest) / sum(cf^2), with rest = investment - cash_flow.
/// The oracle counterpart of a no-intercept ols_fit of investment on
/// cash_flow. Requires every cash_flow != 0.
double expected_origin_slope(const Panel& panel);

} // namespace asiaudit
