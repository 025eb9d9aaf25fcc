#include "asiaudit/prep.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "asiaudit/errors.hpp"
#include "asiaudit/numeric.hpp"

namespace asiaudit {

void PrepConfig::validate() const {
    if (!(trim_fraction >= 0.0 && trim_fraction < 0.25))
        throw ConfigError("trim_fraction must lie in [0, 0.25)");
    if (!(identity_tolerance > 0.0))
        throw ConfigError("identity_tolerance must be positive");
}

std::string RemovalRecord::to_json_line() const {
    nlohmann::ordered_json j;
    j["reason"] = reason;
    j["firm_id"] = firm_id;
    j["year"] = year;
    return j.dump();
}

std::optional<double> component_rest(const FirmYearRecord& r) {
    if (r.d_ltd && r.d_capital_stock && r.depreciation && r.dividends &&
        r.d_working_capital && r.d_ofa)
        return *r.d_ltd + *r.d_capital_stock - *r.depreciation - *r.dividends -
               *r.d_working_capital - *r.d_ofa;
    return std::nullopt;
}

double compute_rest(const FirmYearRecord& record, double identity_tolerance,
                    DiagnosticsLog* log) {
    const double residual = record.investment - record.cash_flow;
    if (const auto components = component_rest(record)) {
        const double gap = std::abs(*components - residual);
        const double scale = std::max({1.0, std::abs(record.investment),
                                       std::abs(record.cash_flow)});
        if (gap > identity_tolerance * scale && log)
            log->add(diag::identity_violation, record.firm_id, record.year,
                     "identity components disagree with investment - cash_flow "
                     "by " + std::to_string(gap) + "; residual definition used");
    }
    return residual;
}

Observation scale_observation(const FirmYearRecord& record, double base,
                              double identity_tolerance, DiagnosticsLog* log) {
    if (!(base > 0.0))
        throw NonpositiveScalingBaseError(record.firm_id, record.year);

    // cross-check only; the scaled rest below is inv - cf by construction
    compute_rest(record, identity_tolerance, log);

    Observation o;
    o.firm_id = record.firm_id;
    o.year = record.year;
    o.inv = record.investment / base;
    o.cf = record.cash_flow / base;
    o.rest = o.inv - o.cf;
    o.dummy = sign_dummy(o.rest);
    o.ducf = static_cast<double>(o.dummy) * o.cf;
    o.investment = record.investment;
    o.cash_flow = record.cash_flow;
    o.d_total_assets = record.d_total_assets;
    o.d_total_funds = record.d_total_funds;
    return o;
}

TrimResult trim_panel(std::vector<Observation> observations, double trim_fraction) {
    if (!(trim_fraction >= 0.0 && trim_fraction < 0.25))
        throw ConfigError("trim_fraction must lie in [0, 0.25)");

    TrimResult result;
    if (trim_fraction == 0.0) {
        result.survivors = std::move(observations);
        return result;
    }
    if (observations.size() < 10)
        throw TooFewObservationsError(
            "trimming requires at least 10 observations, got " +
            std::to_string(observations.size()));

    std::vector<double> inv_sorted, cf_sorted;
    inv_sorted.reserve(observations.size());
    cf_sorted.reserve(observations.size());
    for (const auto& o : observations) {
        inv_sorted.push_back(o.inv);
        cf_sorted.push_back(o.cf);
    }
    std::sort(inv_sorted.begin(), inv_sorted.end());
    std::sort(cf_sorted.begin(), cf_sorted.end());

    const double inv_lo = percentile_hf7_sorted(inv_sorted, trim_fraction);
    const double inv_hi = percentile_hf7_sorted(inv_sorted, 1.0 - trim_fraction);
    const double cf_lo = percentile_hf7_sorted(cf_sorted, trim_fraction);
    const double cf_hi = percentile_hf7_sorted(cf_sorted, 1.0 - trim_fraction);

    result.survivors.reserve(observations.size());
    for (auto& o : observations) {
        if (o.inv < inv_lo || o.inv > inv_hi)
            result.removed.push_back({diag::trimmed_inv, o.firm_id, o.year});
        else if (o.cf < cf_lo || o.cf > cf_hi)
            result.removed.push_back({diag::trimmed_cf, o.firm_id, o.year});
        else
            result.survivors.push_back(std::move(o));
    }
    return result;
}

PrepResult build_observations(const Panel& panel, const PrepConfig& config,
                              DiagnosticsLog* log) {
    config.validate();
    if (panel.schema_mode != SchemaMode::flow)
        throw ConfigError("build_observations requires a flow-mode panel");

    PrepResult result;
    std::vector<Observation> observations;
    observations.reserve(panel.records.size());

    for (std::size_t i = 0; i < panel.records.size(); ++i) {
        const FirmYearRecord& r = panel.records[i];
        double base = 0.0;
        if (config.scale_base == ScaleBase::lagged_total_assets) {
            const auto lagged = lagged_total_assets(panel, i);
            if (!lagged) {
                result.removed.push_back({diag::missing_prior_year, r.firm_id, r.year});
                if (log)
                    log->add(diag::missing_prior_year, r.firm_id, r.year,
                             "no lagged total_assets; record excluded");
                continue;
            }
            base = *lagged;
        } else {
            base = r.total_assets;
        }
        if (!(base > 0.0)) {
            result.removed.push_back({diag::nonpositive_base, r.firm_id, r.year});
            if (log)
                log->add(diag::nonpositive_base, r.firm_id, r.year,
                         "scaling base is not positive; record excluded");
            continue;
        }
        observations.push_back(
            scale_observation(r, base, config.identity_tolerance, log));
    }

    TrimResult trimmed = trim_panel(std::move(observations), config.trim_fraction);
    result.observations = std::move(trimmed.survivors);
    for (auto& rem : trimmed.removed) {
        if (log)
            log->add(rem.reason, rem.firm_id, rem.year, "trimmed outlier");
        result.removed.push_back(std::move(rem));
    }
    return result;
}

} // namespace asiaudit
