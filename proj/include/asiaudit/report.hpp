#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "asiaudit/asi_diag.hpp"

namespace asiaudit {

/// One audit-table row, flattened from an AsiDiagnostic. Optional cells are
/// absent for degenerate panels.
struct Table1Row {
    std::string panel_label;
    double restricted_cf_coef = 0.0;
    double restricted_cf_t = 0.0;
    bool restricted_cf_sig = false;
    std::optional<double> unrestricted_cf_coef;
    std::optional<double> unrestricted_cf_t;
    bool unrestricted_cf_sig = false;
    std::optional<double> ducf_coef;
    std::optional<double> ducf_t;
    bool ducf_sig = false;
    double f_restricted = 0.0;
    bool f_restricted_sig = false;
    std::optional<double> f_unrestricted;
    bool f_unrestricted_sig = false;
    double r2_restricted = 0.0;
    std::optional<double> r2_unrestricted;
    double rss_restricted = 0.0;
    std::optional<double> rss_unrestricted;
    std::optional<double> f_if;
    std::optional<double> f_if_pvalue;
    bool f_if_sig = false;
    std::optional<double> delta_power;
    std::optional<double> share_inv_dta;
    std::optional<double> share_cf_dtf;
    std::optional<std::string> degenerate_cell;  // "DEGENERATE(<reason>)"

    static Table1Row from_diagnostic(const AsiDiagnostic& d);
};

/// Means of delta_power, share_inv_dta and share_cf_dtf across rows where
/// present (compensated sums, exact arithmetic mean before any formatting).
struct TableTotals {
    std::optional<double> mean_delta_power;
    std::optional<double> mean_share_inv_dta;
    std::optional<double> mean_share_cf_dtf;
};

TableTotals compute_totals(std::span<const Table1Row> rows);

enum class TableFormat { text, csv, json, markdown };

TableFormat table_format_from_string(const std::string& name);  // throws ConfigError

/// Renders the audit table. text/markdown/csv share the same cells:
/// coefficients and t-statistics with 2 decimals, delta_power and shares as
/// percentages with 2 decimals and '.' separator, 1%-significant statistics
/// marked with '*' (legend included), degenerate panels showing an explicit
/// DEGENERATE(<reason>) cell, plus a Total-mean row. json emits the full
/// report schema (schema_version + diagnostics array) at full precision.
std::string render_table(std::span<const AsiDiagnostic> diagnostics,
                         TableFormat format);

/// Report document: {"schema_version": 1, "diagnostics": [...]}.
nlohmann::json report_to_json(std::span<const AsiDiagnostic> diagnostics);
std::vector<AsiDiagnostic> report_from_json(const nlohmann::json& doc);

} // namespace asiaudit
