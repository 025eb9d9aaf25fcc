#include "asiaudit/panel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "asiaudit/errors.hpp"

namespace asiaudit {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    if (!fields.empty() && !fields.back().empty() && fields.back().back() == '\r')
        fields.back().pop_back();
    return fields;
}

std::string trim_ws(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& s, double& out) {
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last && std::isfinite(out);
}

bool parse_int(const std::string& s, int& out) {
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last;
}

struct ColumnMap {
    std::unordered_map<std::string, std::size_t> index;

    std::size_t require(const std::string& name) const {
        auto it = index.find(name);
        if (it == index.end())
            throw MissingColumnError(name);
        return it->second;
    }
    std::optional<std::size_t> optional(const std::string& name) const {
        auto it = index.find(name);
        if (it == index.end())
            return std::nullopt;
        return it->second;
    }
};

class RowReader {
public:
    RowReader(const std::vector<std::string>& fields, std::size_t row,
              DiagnosticsLog* log)
        : fields_(fields), row_(row), log_(log) {}

    bool ok() const { return ok_; }

    std::string str(std::size_t idx) const {
        return idx < fields_.size() ? trim_ws(fields_[idx]) : std::string{};
    }

    double required_double(std::size_t idx, const char* column) {
        double v = 0.0;
        const std::string cell = str(idx);
        if (cell.empty() || !parse_double(cell, v))
            fail(column, cell);
        return v;
    }

    int required_int(std::size_t idx, const char* column) {
        int v = 0;
        const std::string cell = str(idx);
        if (cell.empty() || !parse_int(cell, v))
            fail(column, cell);
        return v;
    }

    std::optional<double> optional_double(std::optional<std::size_t> idx,
                                          const char* column) {
        if (!idx)
            return std::nullopt;
        const std::string cell = str(*idx);
        if (cell.empty())
            return std::nullopt;
        double v = 0.0;
        if (!parse_double(cell, v)) {
            fail(column, cell);
            return std::nullopt;
        }
        return v;
    }

private:
    void fail(const char* column, const std::string& cell) {
        ok_ = false;
        if (log_)
            log_->add("parse_error", "", std::nullopt,
                      std::string("unparseable value '") + cell + "' in column " +
                          column,
                      row_);
    }

    const std::vector<std::string>& fields_;
    std::size_t row_;
    DiagnosticsLog* log_;
    bool ok_ = true;
};

void sort_and_check_keys(Panel& panel) {
    auto key_less = [](const auto& a, const auto& b) {
        if (a.firm_id != b.firm_id)
            return a.firm_id < b.firm_id;
        return a.year < b.year;
    };
    if (panel.schema_mode == SchemaMode::flow)
        std::stable_sort(panel.records.begin(), panel.records.end(), key_less);
    else
        std::stable_sort(panel.levels.begin(), panel.levels.end(), key_less);

    auto check = [](const auto& records) {
        for (std::size_t i = 1; i < records.size(); ++i)
            if (records[i].firm_id == records[i - 1].firm_id &&
                records[i].year == records[i - 1].year)
                throw DuplicateKeyError(records[i].firm_id, records[i].year);
    };
    if (panel.schema_mode == SchemaMode::flow)
        check(panel.records);
    else
        check(panel.levels);
}

void append_number(std::string& out, double v) {
    char buf[32];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, r.ptr);
}

void append_optional(std::string& out, const std::optional<double>& v) {
    out += ',';
    if (v)
        append_number(out, *v);
}

} // namespace

Panel ingest_csv(std::istream& in, SchemaMode schema_mode,
                 const std::string& provenance, DiagnosticsLog* log) {
    std::string header_line;
    if (!std::getline(in, header_line))
        throw EmptyPanelError("input has no header row");

    ColumnMap columns;
    {
        auto names = split_line(header_line);
        for (std::size_t i = 0; i < names.size(); ++i)
            columns.index[trim_ws(names[i])] = i;
    }

    Panel panel;
    panel.provenance = provenance;
    panel.schema_mode = schema_mode;

    const std::size_t c_firm = columns.require("firm_id");
    const std::size_t c_year = columns.require("year");
    const std::size_t c_ta = columns.require("total_assets");

    if (schema_mode == SchemaMode::flow) {
        const std::size_t c_inv = columns.require("investment");
        const std::size_t c_cf = columns.require("cash_flow");
        const auto c_ltd = columns.optional("d_ltd");
        const auto c_cs = columns.optional("d_capital_stock");
        const auto c_dep = columns.optional("depreciation");
        const auto c_div = columns.optional("dividends");
        const auto c_wc = columns.optional("d_working_capital");
        const auto c_ofa = columns.optional("d_ofa");
        const auto c_dta = columns.optional("d_total_assets");
        const auto c_dtf = columns.optional("d_total_funds");

        std::string line;
        for (std::size_t row = 1; std::getline(in, line); ++row) {
            if (line.empty() || line == "\r")
                continue;
            const auto fields = split_line(line);
            RowReader r(fields, row, log);
            FirmYearRecord rec;
            rec.firm_id = r.str(c_firm);
            if (rec.firm_id.empty()) {
                r.required_double(c_firm, "firm_id");  // reports the empty cell
                continue;
            }
            rec.year = r.required_int(c_year, "year");
            rec.total_assets = r.required_double(c_ta, "total_assets");
            rec.investment = r.required_double(c_inv, "investment");
            rec.cash_flow = r.required_double(c_cf, "cash_flow");
            rec.d_ltd = r.optional_double(c_ltd, "d_ltd");
            rec.d_capital_stock = r.optional_double(c_cs, "d_capital_stock");
            rec.depreciation = r.optional_double(c_dep, "depreciation");
            rec.dividends = r.optional_double(c_div, "dividends");
            rec.d_working_capital = r.optional_double(c_wc, "d_working_capital");
            rec.d_ofa = r.optional_double(c_ofa, "d_ofa");
            rec.d_total_assets = r.optional_double(c_dta, "d_total_assets");
            rec.d_total_funds = r.optional_double(c_dtf, "d_total_funds");
            if (r.ok())
                panel.records.push_back(std::move(rec));
        }
    } else {
        const std::size_t c_lta = columns.require("long_term_assets");
        const std::size_t c_cf = columns.require("cash_flow");
        const auto c_ltd = columns.optional("ltd");
        const auto c_cs = columns.optional("capital_stock");
        const auto c_wc = columns.optional("working_capital");
        const auto c_ofa = columns.optional("ofa");
        const auto c_dep = columns.optional("depreciation");
        const auto c_div = columns.optional("dividends");

        std::string line;
        for (std::size_t row = 1; std::getline(in, line); ++row) {
            if (line.empty() || line == "\r")
                continue;
            const auto fields = split_line(line);
            RowReader r(fields, row, log);
            LevelRecord rec;
            rec.firm_id = r.str(c_firm);
            if (rec.firm_id.empty()) {
                r.required_double(c_firm, "firm_id");
                continue;
            }
            rec.year = r.required_int(c_year, "year");
            rec.total_assets = r.required_double(c_ta, "total_assets");
            rec.long_term_assets = r.required_double(c_lta, "long_term_assets");
            rec.cash_flow = r.required_double(c_cf, "cash_flow");
            rec.ltd = r.optional_double(c_ltd, "ltd");
            rec.capital_stock = r.optional_double(c_cs, "capital_stock");
            rec.working_capital = r.optional_double(c_wc, "working_capital");
            rec.ofa = r.optional_double(c_ofa, "ofa");
            rec.depreciation = r.optional_double(c_dep, "depreciation");
            rec.dividends = r.optional_double(c_div, "dividends");
            if (r.ok())
                panel.levels.push_back(std::move(rec));
        }
    }

    if (panel.size() == 0)
        throw EmptyPanelError();
    sort_and_check_keys(panel);
    return panel;
}

Panel ingest_csv(const std::string& path, SchemaMode schema_mode,
                 DiagnosticsLog* log) {
    std::ifstream in(path);
    if (!in)
        throw DataError("file_error", "cannot open input file: " + path);
    return ingest_csv(in, schema_mode, path, log);
}

void write_csv(const Panel& panel, std::ostream& out) {
    if (panel.schema_mode != SchemaMode::flow)
        throw ConfigError("write_csv supports flow-mode panels only");
    out << "firm_id,year,total_assets,investment,cash_flow,d_ltd,"
           "d_capital_stock,depreciation,dividends,d_working_capital,d_ofa,"
           "d_total_assets,d_total_funds\n";
    std::string line;
    for (const auto& r : panel.records) {
        line.clear();
        line += r.firm_id;
        line += ',';
        line += std::to_string(r.year);
        line += ',';
        append_number(line, r.total_assets);
        line += ',';
        append_number(line, r.investment);
        line += ',';
        append_number(line, r.cash_flow);
        append_optional(line, r.d_ltd);
        append_optional(line, r.d_capital_stock);
        append_optional(line, r.depreciation);
        append_optional(line, r.dividends);
        append_optional(line, r.d_working_capital);
        append_optional(line, r.d_ofa);
        append_optional(line, r.d_total_assets);
        append_optional(line, r.d_total_funds);
        line += '\n';
        out << line;
    }
}

void write_csv(const Panel& panel, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw DataError("file_error", "cannot open output file: " + path);
    write_csv(panel, out);
}

Panel difference_panel(const Panel& panel, DiagnosticsLog* log) {
    if (panel.schema_mode != SchemaMode::level)
        throw ConfigError("difference_panel requires a level-mode panel");

    Panel out;
    out.provenance = panel.provenance;
    out.schema_mode = SchemaMode::flow;

    const auto& levels = panel.levels;
    auto diff_opt = [](const std::optional<double>& now,
                       const std::optional<double>& prev) -> std::optional<double> {
        if (now && prev)
            return *now - *prev;
        return std::nullopt;
    };

    std::size_t i = 0;
    while (i < levels.size()) {
        // firm block [i, j)
        std::size_t j = i + 1;
        while (j < levels.size() && levels[j].firm_id == levels[i].firm_id)
            ++j;

        if (j - i == 1) {
            if (log)
                log->add("single_year_firm", levels[i].firm_id, levels[i].year,
                         "firm has a single year; dropped from differencing");
            i = j;
            continue;
        }

        for (std::size_t t = i + 1; t < j; ++t) {
            const LevelRecord& prev = levels[t - 1];
            const LevelRecord& now = levels[t];
            if (now.year != prev.year + 1) {
                if (log)
                    log->add("non_consecutive_years", now.firm_id, now.year,
                             "year gap after " + std::to_string(prev.year) +
                                 "; no difference across the gap");
                continue;
            }
            FirmYearRecord rec;
            rec.firm_id = now.firm_id;
            rec.year = now.year;
            rec.total_assets = now.total_assets;
            rec.investment = now.long_term_assets - prev.long_term_assets;
            rec.cash_flow = now.cash_flow;
            rec.d_ltd = diff_opt(now.ltd, prev.ltd);
            rec.d_capital_stock = diff_opt(now.capital_stock, prev.capital_stock);
            rec.depreciation = now.depreciation;
            rec.dividends = now.dividends;
            rec.d_working_capital = diff_opt(now.working_capital, prev.working_capital);
            rec.d_ofa = diff_opt(now.ofa, prev.ofa);
            rec.d_total_assets = now.total_assets - prev.total_assets;
            out.records.push_back(std::move(rec));
        }
        i = j;
    }
    return out;
}

std::optional<double> lagged_total_assets(const Panel& panel, std::size_t index) {
    const auto& records = panel.records;
    const FirmYearRecord& r = records[index];
    if (r.d_total_assets)
        return r.total_assets - *r.d_total_assets;
    if (index > 0) {
        const FirmYearRecord& prev = records[index - 1];
        if (prev.firm_id == r.firm_id && prev.year == r.year - 1)
            return prev.total_assets;
    }
    return std::nullopt;
}

Panel derive_delta_totals(const Panel& panel, double identity_tolerance,
                          DiagnosticsLog* log) {
    if (panel.schema_mode != SchemaMode::flow)
        throw ConfigError("derive_delta_totals requires a flow-mode panel");

    Panel out = panel;
    auto& records = out.records;
    for (std::size_t i = 0; i < records.size(); ++i) {
        FirmYearRecord& r = records[i];
        if (!r.d_total_assets) {
            bool filled = false;
            if (i > 0) {
                const FirmYearRecord& prev = records[i - 1];
                if (prev.firm_id == r.firm_id && prev.year == r.year - 1) {
                    r.d_total_assets = r.total_assets - prev.total_assets;
                    filled = true;
                }
            }
            if (!filled && log)
                log->add("missing_prior_year", r.firm_id, r.year,
                         "no prior-year total_assets; record excluded from "
                         "share computations");
        }
        if (r.d_total_assets) {
            if (!r.d_total_funds) {
                r.d_total_funds = r.d_total_assets;  // the identity equates them
            } else {
                const double gap = std::abs(*r.d_total_funds - *r.d_total_assets);
                const double scale = std::max(
                    {1.0, std::abs(*r.d_total_assets), std::abs(*r.d_total_funds)});
                if (gap > identity_tolerance * scale && log)
                    log->add("identity_violation", r.firm_id, r.year,
                             "d_total_funds disagrees with d_total_assets by " +
                                 std::to_string(gap));
            }
        }
    }
    return out;
}

} // namespace asiaudit
