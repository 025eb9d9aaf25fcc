#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "asiaudit/diagnostics.hpp"

namespace asiaudit {

/// One firm-year of flow data. Monetary amounts are doubles in whatever
/// currency the source uses; the pipeline is unit-free after scaling.
/// `total_assets` is the end-of-period level; everything else is a flow or
/// a first difference over the period.
struct FirmYearRecord {
    std::string firm_id;
    int year = 0;
    double total_assets = 0.0;
    double investment = 0.0;
    double cash_flow = 0.0;

    // identity components (optional; captured when the source provides them)
    std::optional<double> d_ltd;
    std::optional<double> d_capital_stock;
    std::optional<double> depreciation;
    std::optional<double> dividends;
    std::optional<double> d_working_capital;
    std::optional<double> d_ofa;

    // balance-sheet growth totals
    std::optional<double> d_total_assets;
    std::optional<double> d_total_funds;

    bool operator==(const FirmYearRecord&) const = default;
};

/// One firm-year of level (stock) data, the pre-differencing form.
/// `cash_flow`, `depreciation` and `dividends` are per-period flows even in
/// level mode and are carried through differencing unchanged.
struct LevelRecord {
    std::string firm_id;
    int year = 0;
    double total_assets = 0.0;
    double long_term_assets = 0.0;
    double cash_flow = 0.0;

    std::optional<double> ltd;
    std::optional<double> capital_stock;
    std::optional<double> working_capital;
    std::optional<double> ofa;
    std::optional<double> depreciation;
    std::optional<double> dividends;

    bool operator==(const LevelRecord&) const = default;
};

enum class SchemaMode { flow, level };

/// An immutable-after-construction panel of firm-year data, sorted by
/// (firm_id lexicographic, year ascending). Flow panels use `records`,
/// level panels use `levels`; the other vector is empty.
struct Panel {
    std::vector<FirmYearRecord> records;
    std::vector<LevelRecord> levels;
    std::string provenance;
    SchemaMode schema_mode = SchemaMode::flow;

    std::size_t size() const {
        return schema_mode == SchemaMode::flow ? records.size() : levels.size();
    }
};

// ---- CSV schemas -----------------------------------------------------------
//
// flow mode, required columns:
//   firm_id, year, total_assets, investment, cash_flow
// flow mode, optional columns:
//   d_ltd, d_capital_stock, depreciation, dividends, d_working_capital,
//   d_ofa, d_total_assets, d_total_funds
//
// level mode, required columns:
//   firm_id, year, total_assets, long_term_assets, cash_flow
// level mode, optional columns:
//   ltd, capital_stock, working_capital, ofa, depreciation, dividends
//
// Dialect: comma-separated, UTF-8, header row required, '.' decimal
// separator, empty cell = absent optional field. Fields must not contain
// commas or quotes.

/// Parses a CSV file into a Panel. Rows with unparseable required fields
/// are skipped and reported to `log` as parse_error entries (row numbers are
/// 1-based data rows). Throws MissingColumnError, DuplicateKeyError, or
/// EmptyPanelError (when no row survives). Output is sorted by
/// (firm_id, year).
Panel ingest_csv(const std::string& path, SchemaMode schema_mode,
                 DiagnosticsLog* log = nullptr);

/// Stream variant of ingest_csv; `provenance` labels the panel.
Panel ingest_csv(std::istream& in, SchemaMode schema_mode,
                 const std::string& provenance, DiagnosticsLog* log = nullptr);

/// Writes a flow-mode panel in the flow CSV schema above. Numbers are
/// emitted with shortest round-trip formatting, so ingest_csv(write_csv(p))
/// reproduces p field-for-field.
void write_csv(const Panel& panel, const std::string& path);
void write_csv(const Panel& panel, std::ostream& out);

/// First-differences a level-mode panel into a flow-mode panel. Each
/// contiguous run of years in a firm yields run_length - 1 records; the
/// first year of a run is the differencing base and is dropped. Year gaps
/// break runs (non_consecutive_years diagnostic); single-year firms are
/// dropped entirely (single_year_firm diagnostic). investment = first
/// difference of long_term_assets; d_total_assets is always populated.
Panel difference_panel(const Panel& panel, DiagnosticsLog* log = nullptr);

/// Fills d_total_assets (from the prior consecutive year's total_assets
/// when absent) and d_total_funds (set equal to d_total_assets when the
/// source provides none, else cross-checked against it within
/// identity_tolerance, emitting identity_violation on disagreement).
/// Records whose d_total_assets cannot be recovered are flagged
/// missing_prior_year and left without totals. Never changes investment or
/// cash_flow. Pure: returns a new panel.
Panel derive_delta_totals(const Panel& panel, double identity_tolerance = 1e-6,
                          DiagnosticsLog* log = nullptr);

/// End-of-prior-period total assets for records[index]: total_assets minus
/// d_total_assets when the delta is present, else the consecutive prior
/// record's total_assets. nullopt when neither is available.
std::optional<double> lagged_total_assets(const Panel& panel, std::size_t index);

} // namespace asiaudit
