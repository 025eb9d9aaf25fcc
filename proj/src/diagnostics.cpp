#include "asiaudit/diagnostics.hpp"

#include <nlohmann/json.hpp>

namespace asiaudit {

std::string DiagnosticEntry::to_json_line() const {
    nlohmann::ordered_json j;
    j["code"] = code;
    if (row)
        j["row"] = *row;
    if (!firm_id.empty())
        j["firm_id"] = firm_id;
    if (year)
        j["year"] = *year;
    j["message"] = message;
    return j.dump();
}

std::string DiagnosticsLog::to_json_lines() const {
    std::string out;
    for (const auto& e : entries_) {
        out += e.to_json_line();
        out += '\n';
    }
    return out;
}

} // namespace asiaudit
