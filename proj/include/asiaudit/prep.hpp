#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "asiaudit/diagnostics.hpp"
#include "asiaudit/panel.hpp"

namespace asiaudit {

/// Analysis-ready row. inv, cf, rest are scaled by the chosen total-assets
/// base and satisfy inv - cf - rest == 0 by construction (rest is set to
/// inv - cf after scaling). investment / cash_flow keep the unscaled money
/// values for the balance-sheet decomposition shares.
struct Observation {
    std::string firm_id;
    int year = 0;

    double inv = 0.0;   // investment / base
    double cf = 0.0;    // cash_flow / base
    double rest = 0.0;  // inv - cf, the identity residual
    int dummy = 0;      // 1 iff rest > 0
    double ducf = 0.0;  // dummy * cf

    double investment = 0.0;  // unscaled
    double cash_flow = 0.0;   // unscaled
    std::optional<double> d_total_assets;
    std::optional<double> d_total_funds;
};

enum class ScaleBase { lagged_total_assets, current_total_assets };

struct PrepConfig {
    ScaleBase scale_base = ScaleBase::lagged_total_assets;
    double trim_fraction = 0.01;       // must be in [0, 0.25)
    double identity_tolerance = 1e-6;  // relative, for component cross-checks

    void validate() const;  // throws ConfigError
};

/// Why a row was removed during preprocessing. Serializes to JSON lines of
/// the form {reason, firm_id, year}.
struct RemovalRecord {
    std::string reason;  // trimmed_inv | trimmed_cf | nonpositive_base |
                         // identity_violation | missing_prior_year
    std::string firm_id;
    int year = 0;

    std::string to_json_line() const;
};

/// Sum of the identity components when all six are present, else nullopt:
/// d_ltd + d_capital_stock - depreciation - dividends - d_working_capital - d_ofa.
std::optional<double> component_rest(const FirmYearRecord& record);

/// The identity residual investment - cash_flow. When all six components
/// are present their sum is cross-checked against it within
/// identity_tolerance (relative to max(1, |investment|, |cash_flow|));
/// disagreement emits an identity_violation diagnostic and the residual
/// definition wins.
double compute_rest(const FirmYearRecord& record, double identity_tolerance = 1e-6,
                    DiagnosticsLog* log = nullptr);

/// 1 if rest > 0, 0 otherwise (exact zero counts as 0).
inline int sign_dummy(double rest) { return rest > 0.0 ? 1 : 0; }

/// Scales one record by `base` (> 0, else NonpositiveScalingBaseError).
/// rest is recomputed as inv - cf after scaling so the identity residual
/// invariant holds exactly; the dummy therefore reflects the scaled rest,
/// whose sign matches the unscaled one for any base > 0.
Observation scale_observation(const FirmYearRecord& record, double base,
                              double identity_tolerance = 1e-6,
                              DiagnosticsLog* log = nullptr);

struct TrimResult {
    std::vector<Observation> survivors;
    std::vector<RemovalRecord> removed;
};

/// Removes observations whose inv or cf falls strictly outside the pooled
/// [f, 1-f] percentile band of that variable (Hyndman–Fan type 7 linear
/// interpolation, percentiles computed once on the full input). Order is
/// preserved. trim_fraction == 0 returns the input unchanged; otherwise
/// requires >= 10 observations (TooFewObservationsError).
TrimResult trim_panel(std::vector<Observation> observations, double trim_fraction);

struct PrepResult {
    std::vector<Observation> observations;
    std::vector<RemovalRecord> removed;
};

/// Full preprocessing pipeline for a flow-mode panel: per-record scaling base
/// resolution (lagged bases come from d_total_assets or the consecutive
/// prior record), identity cross-checks, scaling, then trimming. Records
/// without a usable base are removed with reason missing_prior_year or
/// nonpositive_base.
PrepResult build_observations(const Panel& panel, const PrepConfig& config,
                              DiagnosticsLog* log = nullptr);

} // namespace asiaudit
