#include "asiaudit/report.hpp"

#include <algorithm>
#include <cstdio>

#include <nlohmann/json.hpp>

#include "asiaudit/errors.hpp"
#include "asiaudit/numeric.hpp"

namespace asiaudit {

namespace {

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::string fmt2(double v) { return fmt("%.2f", v); }
std::string fmt6g(double v) { return fmt("%.6g", v); }
std::string fmt_pct(double fraction) { return fmt("%.2f", fraction * 100.0) + "%"; }
std::string fmt_pvalue(double p) { return fmt("%.3g", p); }

std::string marked(const std::string& cell, bool significant) {
    return significant ? cell + "*" : cell;
}

std::string opt_cell(const std::optional<double>& v, bool sig,
                     const std::string& fallback) {
    if (!v)
        return fallback;
    return marked(fmt2(*v), sig);
}

} // namespace

Table1Row Table1Row::from_diagnostic(const AsiDiagnostic& d) {
    Table1Row row;
    row.panel_label = d.label;

    const auto& r = d.restricted;
    // column layout is {intercept, cf[, ducf]}; cf sits at index 1
    row.restricted_cf_coef = r.coefficients.size() > 1 ? r.coefficients[1] : 0.0;
    row.restricted_cf_t = r.t_stats.size() > 1 ? r.t_stats[1] : 0.0;
    row.restricted_cf_sig = r.sig_1pct.size() > 1 && r.sig_1pct[1];
    row.f_restricted = r.overall_f;
    row.f_restricted_sig = r.overall_f_pvalue < 0.01;
    row.r2_restricted = r.r2;
    row.rss_restricted = r.rss;

    if (d.unrestricted) {
        const auto& u = *d.unrestricted;
        row.unrestricted_cf_coef = u.coefficients[1];
        row.unrestricted_cf_t = u.t_stats[1];
        row.unrestricted_cf_sig = u.sig_1pct[1];
        row.ducf_coef = u.coefficients[2];
        row.ducf_t = u.t_stats[2];
        row.ducf_sig = u.sig_1pct[2];
        row.f_unrestricted = u.overall_f;
        row.f_unrestricted_sig = u.overall_f_pvalue < 0.01;
        row.r2_unrestricted = u.r2;
        row.rss_unrestricted = u.rss;
    }
    row.f_if = d.f_if;
    row.f_if_pvalue = d.f_if_pvalue;
    row.f_if_sig = d.f_if_pvalue && *d.f_if_pvalue < 0.01;
    row.delta_power = d.delta_power;
    row.share_inv_dta = d.share_inv_dta;
    row.share_cf_dtf = d.share_cf_dtf;
    if (d.degenerate)
        row.degenerate_cell =
            std::string("DEGENERATE(") +
            (d.degenerate_reason ? to_string(*d.degenerate_reason) : "unknown") + ")";
    return row;
}

TableTotals compute_totals(std::span<const Table1Row> rows) {
    TableTotals totals;
    CompensatedSum dp, si, sc;
    std::size_t n_dp = 0, n_si = 0, n_sc = 0;
    for (const auto& row : rows) {
        if (row.delta_power) {
            dp.add(*row.delta_power);
            ++n_dp;
        }
        if (row.share_inv_dta) {
            si.add(*row.share_inv_dta);
            ++n_si;
        }
        if (row.share_cf_dtf) {
            sc.add(*row.share_cf_dtf);
            ++n_sc;
        }
    }
    if (n_dp)
        totals.mean_delta_power = dp.value() / static_cast<double>(n_dp);
    if (n_si)
        totals.mean_share_inv_dta = si.value() / static_cast<double>(n_si);
    if (n_sc)
        totals.mean_share_cf_dtf = sc.value() / static_cast<double>(n_sc);
    return totals;
}

TableFormat table_format_from_string(const std::string& name) {
    if (name == "text")
        return TableFormat::text;
    if (name == "csv")
        return TableFormat::csv;
    if (name == "json")
        return TableFormat::json;
    if (name == "markdown")
        return TableFormat::markdown;
    throw ConfigError("unknown table format: " + name);
}

namespace {

const std::vector<std::string> kHeader = {
    "panel",      "cf_coef_R",  "cf_t_R",     "cf_coef_U",  "cf_t_U",
    "ducf_coef",  "ducf_t",     "F_R",        "F_U",        "R2_R",
    "R2_U",       "RSS_R",      "RSS_U",      "F_IF",       "F_IF_p",
    "delta_power", "share_inv_dTA", "share_cf_dTF"};

std::vector<std::string> row_cells(const Table1Row& row) {
    // a degenerate panel shows the explicit cell once, in the first
    // unrestricted column; the remaining absent cells render as "-"
    const std::string degenerate =
        row.degenerate_cell ? *row.degenerate_cell : std::string("-");
    std::vector<std::string> cells;
    cells.reserve(kHeader.size());
    cells.push_back(row.panel_label);
    cells.push_back(marked(fmt2(row.restricted_cf_coef), row.restricted_cf_sig));
    cells.push_back(fmt2(row.restricted_cf_t));
    cells.push_back(opt_cell(row.unrestricted_cf_coef, row.unrestricted_cf_sig,
                             degenerate));
    cells.push_back(row.unrestricted_cf_t ? fmt2(*row.unrestricted_cf_t) : "-");
    cells.push_back(opt_cell(row.ducf_coef, row.ducf_sig, "-"));
    cells.push_back(row.ducf_t ? fmt2(*row.ducf_t) : "-");
    cells.push_back(marked(fmt6g(row.f_restricted), row.f_restricted_sig));
    cells.push_back(row.f_unrestricted
                        ? marked(fmt6g(*row.f_unrestricted), row.f_unrestricted_sig)
                        : "-");
    cells.push_back(fmt_pct(row.r2_restricted));
    cells.push_back(row.r2_unrestricted ? fmt_pct(*row.r2_unrestricted) : "-");
    cells.push_back(fmt6g(row.rss_restricted));
    cells.push_back(row.rss_unrestricted ? fmt6g(*row.rss_unrestricted) : "-");
    cells.push_back(row.f_if ? marked(fmt6g(*row.f_if), row.f_if_sig) : "-");
    cells.push_back(row.f_if_pvalue ? fmt_pvalue(*row.f_if_pvalue) : "-");
    cells.push_back(row.delta_power ? fmt_pct(*row.delta_power) : "-");
    cells.push_back(row.share_inv_dta ? fmt_pct(*row.share_inv_dta) : "-");
    cells.push_back(row.share_cf_dtf ? fmt_pct(*row.share_cf_dtf) : "-");
    return cells;
}

std::vector<std::string> totals_cells(const TableTotals& totals) {
    std::vector<std::string> cells(kHeader.size(), "");
    cells[0] = "Total mean";
    cells[15] = totals.mean_delta_power ? fmt_pct(*totals.mean_delta_power) : "-";
    cells[16] = totals.mean_share_inv_dta ? fmt_pct(*totals.mean_share_inv_dta) : "-";
    cells[17] = totals.mean_share_cf_dtf ? fmt_pct(*totals.mean_share_cf_dtf) : "-";
    return cells;
}

constexpr const char* kLegend = "* significant at the 1% level";

std::string render_text(const std::vector<std::vector<std::string>>& grid) {
    std::vector<std::size_t> widths(kHeader.size(), 0);
    for (const auto& row : grid)
        for (std::size_t c = 0; c < row.size(); ++c)
            widths[c] = std::max(widths[c], row[c].size());

    std::string out;
    for (const auto& row : grid) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c)
                out += "  ";
            out += row[c];
            out.append(widths[c] - row[c].size(), ' ');
        }
        // trim trailing padding
        while (!out.empty() && out.back() == ' ')
            out.pop_back();
        out += '\n';
    }
    out += kLegend;
    out += '\n';
    return out;
}

std::string render_markdown(const std::vector<std::vector<std::string>>& grid) {
    std::string out;
    for (std::size_t r = 0; r < grid.size(); ++r) {
        out += "|";
        for (const auto& cell : grid[r]) {
            out += ' ';
            out += cell;
            out += " |";
        }
        out += '\n';
        if (r == 0) {
            out += "|";
            for (std::size_t c = 0; c < grid[0].size(); ++c)
                out += " --- |";
            out += '\n';
        }
    }
    out += '\n';
    out += kLegend;
    out += '\n';
    return out;
}

std::string render_csv(const std::vector<std::vector<std::string>>& grid) {
    std::string out;
    for (const auto& row : grid) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c)
                out += ',';
            out += row[c];
        }
        out += '\n';
    }
    return out;
}

} // namespace

std::string render_table(std::span<const AsiDiagnostic> diagnostics,
                         TableFormat format) {
    if (format == TableFormat::json)
        return report_to_json(diagnostics).dump(2) + "\n";

    std::vector<Table1Row> rows;
    rows.reserve(diagnostics.size());
    for (const auto& d : diagnostics)
        rows.push_back(Table1Row::from_diagnostic(d));
    const TableTotals totals = compute_totals(rows);

    std::vector<std::vector<std::string>> grid;
    grid.reserve(rows.size() + 2);
    grid.push_back(kHeader);
    for (const auto& row : rows)
        grid.push_back(row_cells(row));
    grid.push_back(totals_cells(totals));

    switch (format) {
    case TableFormat::text: return render_text(grid);
    case TableFormat::markdown: return render_markdown(grid);
    case TableFormat::csv: return render_csv(grid);
    case TableFormat::json: break;
    }
    return {};
}

nlohmann::json report_to_json(std::span<const AsiDiagnostic> diagnostics) {
    nlohmann::json doc;
    doc["schema_version"] = 1;
    doc["diagnostics"] = nlohmann::json::array();
    for (const auto& d : diagnostics)
        doc["diagnostics"].push_back(diagnostic_to_json(d));
    return doc;
}

std::vector<AsiDiagnostic> report_from_json(const nlohmann::json& doc) {
    if (!doc.contains("schema_version") || doc.at("schema_version").get<int>() != 1)
        throw DataError("schema_error", "unsupported report schema_version");
    std::vector<AsiDiagnostic> out;
    for (const auto& j : doc.at("diagnostics"))
        out.push_back(diagnostic_from_json(j));
    return out;
}

} // namespace asiaudit
