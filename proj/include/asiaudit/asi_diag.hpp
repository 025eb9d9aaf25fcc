#pragma once

#include <optional>
#include <span>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "asiaudit/errors.hpp"
#include "asiaudit/linmodel.hpp"
#include "asiaudit/panel.hpp"
#include "asiaudit/prep.hpp"

namespace asiaudit {

/// Paired restricted / unrestricted comparison for one panel. When the
/// dummy is degenerate the unrestricted side and the incremental-fit
/// statistics are absent and `degenerate_reason` says why.
struct AsiDiagnostic {
    std::string label;

    RegressionResult restricted;
    std::optional<RegressionResult> unrestricted;

    long long m = 1;  // added parameters
    std::optional<double> f_if;
    std::optional<double> f_if_pvalue;
    std::optional<double> delta_power;  // (r2_u - r2_r) / r2_u, a fraction

    std::optional<double> share_inv_dta;  // sum(investment) / sum(d_total_assets)
    std::optional<double> share_cf_dtf;   // sum(cash_flow) / sum(d_total_funds)

    // smallest conventional level in {0.10, 0.05, 0.01} at which b2 != 0
    std::optional<double> h1_rejected_at;

    bool degenerate = false;
    std::optional<DummyDegeneracy> degenerate_reason;

    long long n_observations = 0;  // rows surviving preprocessing
    long long rows_removed = 0;
};

/// Fits inv on {intercept, cf}.
RegressionResult run_restricted(std::span<const Observation> observations);

/// Fits inv on {intercept, cf, ducf}. Throws DegenerateDummyError when the
/// dummies are all equal, reporting the dominant sign.
RegressionResult run_unrestricted(std::span<const Observation> observations);

/// Incremental F for nested models: ((rss_r - rss_u) / m) / (rss_u / (n - k)).
/// Requires rss_u > 0, rss_r >= rss_u (InvalidNestingError beyond rounding),
/// n > k, m >= 1. rss_r below rss_u by at most 1e-12 relative is treated as
/// equal and yields 0.
double incremental_f(double rss_r, double rss_u, long long m, long long n,
                     long long k);

/// (r2_u - r2_r) / r2_u. Requires 0 < r2_u <= 1 and 0 <= r2_r <= r2_u
/// (DomainError otherwise).
double delta_explanatory_power(double r2_r, double r2_u);

struct DecompositionShares {
    double share_inv_dta = 0.0;
    double share_cf_dtf = 0.0;
};

/// Aggregate-ratio balance-sheet shares over unscaled money values:
/// sum(investment)/sum(d_total_assets) and sum(cash_flow)/sum(d_total_funds),
/// each over the observations where the denominator field is present.
/// Throws ZeroDenominatorError when no totals exist or a sum is zero.
DecompositionShares decomposition_shares(std::span<const Observation> observations);

/// End-to-end audit of one panel: derives totals, preprocesses, fits both
/// models, and assembles the incremental-fit statistics and shares. Level
/// panels are differenced first. A degenerate dummy yields a diagnostic
/// with restricted results only (no error). Errors from pipeline stages are
/// propagated with a stage prefix in the message.
AsiDiagnostic diagnose(const Panel& panel, const PrepConfig& prep_config,
                       DiagnosticsLog* log = nullptr);

/// Stable JSON schema for AsiDiagnostic (field names as in the struct;
/// fractions stay fractions, formatting happens in the report layer).
nlohmann::json diagnostic_to_json(const AsiDiagnostic& d);
AsiDiagnostic diagnostic_from_json(const nlohmann::json& j);

} // namespace asiaudit
