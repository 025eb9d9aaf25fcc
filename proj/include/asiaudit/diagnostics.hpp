#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace asiaudit {

/// One row-level warning or non-fatal error. Serializes to a single JSON
/// line of the form {code, row, firm_id, year, message}; absent fields are
/// omitted.
struct DiagnosticEntry {
    std::string code;
    std::optional<std::size_t> row;  // 1-based CSV data row, when applicable
    std::string firm_id;
    std::optional<int> year;
    std::string message;

    std::string to_json_line() const;
};

// stable diagnostic codes
namespace diag {
inline constexpr const char* parse_error = "parse_error";
inline constexpr const char* non_consecutive_years = "non_consecutive_years";
inline constexpr const char* single_year_firm = "single_year_firm";
inline constexpr const char* identity_violation = "identity_violation";
inline constexpr const char* missing_prior_year = "missing_prior_year";
inline constexpr const char* nonpositive_base = "nonpositive_base";
inline constexpr const char* trimmed_inv = "trimmed_inv";
inline constexpr const char* trimmed_cf = "trimmed_cf";
} // namespace diag

/// Collects DiagnosticEntry records during a pipeline run. Not thread-safe;
/// use one log per concurrently processed panel.
class DiagnosticsLog {
public:
    void add(DiagnosticEntry entry) { entries_.push_back(std::move(entry)); }

    void add(const std::string& code, const std::string& firm_id,
             std::optional<int> year, const std::string& message,
             std::optional<std::size_t> row = std::nullopt) {
        entries_.push_back(DiagnosticEntry{code, row, firm_id, year, message});
    }

    const std::vector<DiagnosticEntry>& entries() const noexcept { return entries_; }
    bool empty() const noexcept { return entries_.empty(); }
    std::size_t size() const noexcept { return entries_.size(); }

    std::size_t count(const std::string& code) const {
        std::size_t n = 0;
        for (const auto& e : entries_)
            if (e.code == code) ++n;
        return n;
    }

    /// All entries as newline-separated JSON lines.
    std::string to_json_lines() const;

private:
    std::vector<DiagnosticEntry> entries_;
};

} // namespace asiaudit
