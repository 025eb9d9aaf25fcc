#include "asiaudit/asi_diag.hpp"

#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "asiaudit/errors.hpp"
#include "asiaudit/numeric.hpp"

namespace asiaudit {

RegressionResult run_restricted(std::span<const Observation> observations) {
    if (observations.size() < 3)
        throw TooFewObservationsError("restricted model needs >= 3 observations");
    return ols_fit(observations, DesignSpec::restricted());
}

RegressionResult run_unrestricted(std::span<const Observation> observations) {
    if (observations.size() < 4)
        throw TooFewObservationsError("unrestricted model needs >= 4 observations");
    return ols_fit(observations, DesignSpec::unrestricted());
}

double incremental_f(double rss_r, double rss_u, long long m, long long n,
                     long long k) {
    if (m < 1)
        throw DomainError("incremental_f requires m >= 1");
    if (n <= k)
        throw DomainError("incremental_f requires n > k");
    if (!(rss_u > 0.0))
        throw DomainError("incremental_f requires rss_u > 0");
    if (rss_r < rss_u) {
        // nested models cannot worsen the fit; allow rounding-level slack
        if (rss_u - rss_r <= 1e-12 * rss_u)
            return 0.0;
        throw InvalidNestingError(
            "restricted RSS " + std::to_string(rss_r) +
            " below unrestricted RSS " + std::to_string(rss_u) +
            "; models are not nested on the same data");
    }
    return ((rss_r - rss_u) / static_cast<double>(m)) /
           (rss_u / static_cast<double>(n - k));
}

double delta_explanatory_power(double r2_r, double r2_u) {
    if (!(r2_u > 0.0) || r2_u > 1.0)
        throw DomainError("delta_explanatory_power requires 0 < r2_u <= 1");
    if (r2_r < 0.0 || r2_r > r2_u)
        throw DomainError("delta_explanatory_power requires 0 <= r2_r <= r2_u");
    return (r2_u - r2_r) / r2_u;
}

DecompositionShares decomposition_shares(std::span<const Observation> observations) {
    CompensatedSum inv_sum, dta_sum, cf_sum, dtf_sum;
    std::size_t with_dta = 0, with_dtf = 0;
    for (const auto& o : observations) {
        if (o.d_total_assets) {
            inv_sum.add(o.investment);
            dta_sum.add(*o.d_total_assets);
            ++with_dta;
        }
        if (o.d_total_funds) {
            cf_sum.add(o.cash_flow);
            dtf_sum.add(*o.d_total_funds);
            ++with_dtf;
        }
    }
    if (with_dta == 0)
        throw ZeroDenominatorError("no records carry d_total_assets");
    if (dta_sum.value() == 0.0)
        throw ZeroDenominatorError("sum of d_total_assets is zero");
    if (with_dtf == 0 || dtf_sum.value() == 0.0)
        throw ZeroDenominatorError("sum of d_total_funds is zero or absent");

    DecompositionShares shares;
    shares.share_inv_dta = inv_sum.value() / dta_sum.value();
    shares.share_cf_dtf = cf_sum.value() / dtf_sum.value();
    return shares;
}

namespace {

[[noreturn]] void rethrow_with_stage(const char* stage, const Error& e) {
    throw Error(e.code(), std::string(stage) + ": " + e.what());
}

} // namespace

AsiDiagnostic diagnose(const Panel& panel, const PrepConfig& prep_config,
                       DiagnosticsLog* log) {
    AsiDiagnostic d;
    d.label = panel.provenance;

    const Panel* flow = &panel;
    Panel differenced;
    if (panel.schema_mode == SchemaMode::level) {
        differenced = difference_panel(panel, log);
        flow = &differenced;
    }
    if (flow->records.empty())
        throw EmptyPanelError();

    Panel with_totals;
    PrepResult prep;
    try {
        with_totals = derive_delta_totals(*flow, prep_config.identity_tolerance, log);
        prep = build_observations(with_totals, prep_config, log);
    } catch (const Error& e) {
        rethrow_with_stage("prep", e);
    }
    const auto& obs = prep.observations;
    d.n_observations = static_cast<long long>(obs.size());
    d.rows_removed = static_cast<long long>(prep.removed.size());
    if (obs.empty())
        throw EmptyPanelError("no observations survive preprocessing");
    if (obs.size() < 10)
        throw TooFewObservationsError(
            "diagnosis needs >= 10 observations after preprocessing, got " +
            std::to_string(obs.size()));

    try {
        d.restricted = run_restricted(obs);
    } catch (const Error& e) {
        rethrow_with_stage("restricted fit", e);
    }

    try {
        d.unrestricted = run_unrestricted(obs);
    } catch (const DegenerateDummyError& e) {
        d.degenerate = true;
        d.degenerate_reason = e.reason();
    } catch (const Error& e) {
        rethrow_with_stage("unrestricted fit", e);
    }

    if (d.unrestricted) {
        const auto& u = *d.unrestricted;
        try {
            d.f_if = incremental_f(d.restricted.rss, u.rss, d.m, u.n, u.k);
            d.f_if_pvalue = f_sf(*d.f_if, static_cast<double>(d.m),
                                 static_cast<double>(u.n - u.k));
            // guard rounding when the added regressor buys nothing
            const double r2_u = std::max(u.r2, d.restricted.r2);
            if (r2_u > 0.0)
                d.delta_power = delta_explanatory_power(
                    std::min(d.restricted.r2, r2_u), r2_u);
        } catch (const Error& e) {
            rethrow_with_stage("incremental fit", e);
        }

        const double p_b2 = u.p_values.back();
        if (p_b2 < 0.01)
            d.h1_rejected_at = 0.01;
        else if (p_b2 < 0.05)
            d.h1_rejected_at = 0.05;
        else if (p_b2 < 0.10)
            d.h1_rejected_at = 0.10;
    }

    try {
        const DecompositionShares shares = decomposition_shares(obs);
        d.share_inv_dta = shares.share_inv_dta;
        d.share_cf_dtf = shares.share_cf_dtf;
    } catch (const ZeroDenominatorError&) {
        if (log)
            log->add("zero_denominator", "", std::nullopt,
                     "balance-sheet shares unavailable: no usable totals");
    }
    return d;
}

// ---- JSON serialization -----------------------------------------------------

namespace {

nlohmann::json regression_to_json(const RegressionResult& r) {
    nlohmann::json j;
    j["regressors"] = r.regressors;
    j["coefficients"] = r.coefficients;
    j["std_errors"] = r.std_errors;
    j["t_stats"] = r.t_stats;
    j["p_values"] = r.p_values;
    j["sig_1pct"] = r.sig_1pct;
    j["rss"] = r.rss;
    j["tss"] = r.tss;
    j["r2"] = r.r2;
    j["uncentered_r2"] = r.uncentered_r2;
    j["overall_f"] = r.overall_f;
    j["overall_f_pvalue"] = r.overall_f_pvalue;
    j["n"] = r.n;
    j["k"] = r.k;
    return j;
}

// JSON has no literal for non-finite doubles; nlohmann dumps them as null.
// Reading maps null back to +infinity, the only non-finite value the fits
// produce (perfect-fit F and t statistics).
double num_from_json(const nlohmann::json& v) {
    if (v.is_null())
        return std::numeric_limits<double>::infinity();
    return v.get<double>();
}

std::vector<double> nums_from_json(const nlohmann::json& arr) {
    std::vector<double> out;
    out.reserve(arr.size());
    for (const auto& v : arr)
        out.push_back(num_from_json(v));
    return out;
}

RegressionResult regression_from_json(const nlohmann::json& j) {
    RegressionResult r;
    r.regressors = j.at("regressors").get<std::vector<std::string>>();
    r.coefficients = nums_from_json(j.at("coefficients"));
    r.std_errors = nums_from_json(j.at("std_errors"));
    r.t_stats = nums_from_json(j.at("t_stats"));
    r.p_values = nums_from_json(j.at("p_values"));
    r.sig_1pct = j.at("sig_1pct").get<std::vector<bool>>();
    r.rss = num_from_json(j.at("rss"));
    r.tss = num_from_json(j.at("tss"));
    r.r2 = num_from_json(j.at("r2"));
    r.uncentered_r2 = j.at("uncentered_r2").get<bool>();
    r.overall_f = num_from_json(j.at("overall_f"));
    r.overall_f_pvalue = num_from_json(j.at("overall_f_pvalue"));
    r.n = j.at("n").get<long long>();
    r.k = j.at("k").get<long long>();
    return r;
}

template <typename T>
nlohmann::json opt_json(const std::optional<T>& v) {
    if (v)
        return *v;
    return nullptr;
}

template <typename T>
std::optional<T> opt_from_json(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null())
        return std::nullopt;
    return j.at(key).get<T>();
}

} // namespace

nlohmann::json diagnostic_to_json(const AsiDiagnostic& d) {
    nlohmann::json j;
    j["label"] = d.label;
    j["restricted"] = regression_to_json(d.restricted);
    j["unrestricted"] =
        d.unrestricted ? regression_to_json(*d.unrestricted) : nlohmann::json(nullptr);
    j["m"] = d.m;
    j["f_if"] = opt_json(d.f_if);
    j["f_if_pvalue"] = opt_json(d.f_if_pvalue);
    j["delta_power"] = opt_json(d.delta_power);
    j["share_inv_dta"] = opt_json(d.share_inv_dta);
    j["share_cf_dtf"] = opt_json(d.share_cf_dtf);
    j["h1_rejected_at"] = opt_json(d.h1_rejected_at);
    j["degenerate"] = d.degenerate;
    j["degenerate_reason"] =
        d.degenerate_reason ? nlohmann::json(to_string(*d.degenerate_reason))
                            : nlohmann::json(nullptr);
    j["n_observations"] = d.n_observations;
    j["rows_removed"] = d.rows_removed;
    return j;
}

AsiDiagnostic diagnostic_from_json(const nlohmann::json& j) {
    AsiDiagnostic d;
    d.label = j.at("label").get<std::string>();
    d.restricted = regression_from_json(j.at("restricted"));
    if (!j.at("unrestricted").is_null())
        d.unrestricted = regression_from_json(j.at("unrestricted"));
    d.m = j.at("m").get<long long>();
    d.f_if = opt_from_json<double>(j, "f_if");
    d.f_if_pvalue = opt_from_json<double>(j, "f_if_pvalue");
    d.delta_power = opt_from_json<double>(j, "delta_power");
    d.share_inv_dta = opt_from_json<double>(j, "share_inv_dta");
    d.share_cf_dtf = opt_from_json<double>(j, "share_cf_dtf");
    d.h1_rejected_at = opt_from_json<double>(j, "h1_rejected_at");
    d.degenerate = j.at("degenerate").get<bool>();
    if (!j.at("degenerate_reason").is_null()) {
        const auto reason = j.at("degenerate_reason").get<std::string>();
        d.degenerate_reason = reason == "all_positive"
                                  ? DummyDegeneracy::all_positive
                                  : DummyDegeneracy::all_nonpositive;
    }
    d.n_observations = j.at("n_observations").get<long long>();
    d.rows_removed = j.at("rows_removed").get<long long>();
    return d;
}

} // namespace asiaudit
