// asiaudit — audit investment–cash flow regressions for accounting
// semi-identity bias: ingest firm-year panels, fit the restricted and
// interaction-augmented models, and report incremental-fit statistics.
// Also generates seeded synthetic panels with controlled identity regimes.

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "asiaudit/asi_diag.hpp"
#include "asiaudit/errors.hpp"
#include "asiaudit/panel.hpp"
#include "asiaudit/prep.hpp"
#include "asiaudit/report.hpp"
#include "asiaudit/synth.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitDegenerate = 3;

enum class LogLevel { silent = 0, warn = 1, debug = 2 };

LogLevel log_level() {
    const char* env = std::getenv("ASIAUDIT_LOG");
    if (!env)
        return LogLevel::warn;
    const std::string v = env;
    if (v == "silent")
        return LogLevel::silent;
    if (v == "debug")
        return LogLevel::debug;
    return LogLevel::warn;
}

void emit_diagnostics(const asiaudit::DiagnosticsLog& log) {
    if (log_level() == LogLevel::silent)
        return;
    std::cerr << log.to_json_lines();
}

void emit_error(const asiaudit::Error& e) {
    nlohmann::ordered_json j;
    j["code"] = e.code();
    j["message"] = e.what();
    std::cerr << j.dump() << "\n";
}

void write_text(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path);
    if (!out)
        throw asiaudit::DataError("file_error", "cannot open output file: " + path);
    out << content;
}

struct DiagnoseOptions {
    std::vector<std::string> inputs;
    std::string schema = "flow";
    std::string scale = "lagged";
    double trim = 0.01;
    std::string out;
    unsigned jobs = 1;
};

asiaudit::PrepConfig make_prep_config(const DiagnoseOptions& opt) {
    asiaudit::PrepConfig config;
    config.scale_base = opt.scale == "current"
                            ? asiaudit::ScaleBase::current_total_assets
                            : asiaudit::ScaleBase::lagged_total_assets;
    config.trim_fraction = opt.trim;
    config.validate();
    return config;
}

int run_diagnose(const DiagnoseOptions& opt) {
    const asiaudit::PrepConfig config = make_prep_config(opt);
    const asiaudit::SchemaMode mode = opt.schema == "level"
                                          ? asiaudit::SchemaMode::level
                                          : asiaudit::SchemaMode::flow;

    const std::size_t n = opt.inputs.size();
    std::vector<asiaudit::AsiDiagnostic> results(n);
    std::vector<asiaudit::DiagnosticsLog> logs(n);
    std::vector<std::string> failures(n);

    auto run_one = [&](std::size_t i) {
        try {
            asiaudit::Panel panel =
                asiaudit::ingest_csv(opt.inputs[i], mode, &logs[i]);
            results[i] = asiaudit::diagnose(panel, config, &logs[i]);
        } catch (const asiaudit::Error& e) {
            failures[i] = std::string("[") + e.code() + "] " + e.what();
        }
    };

    const unsigned jobs = std::max(1u, opt.jobs);
    if (jobs == 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            run_one(i);
    } else {
        std::vector<std::thread> pool;
        std::atomic<std::size_t> next{0};
        for (unsigned t = 0; t < std::min<std::size_t>(jobs, n); ++t)
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1))
                    run_one(i);
            });
        for (auto& th : pool)
            th.join();
    }

    // deterministic output ordering: input order
    for (std::size_t i = 0; i < n; ++i)
        emit_diagnostics(logs[i]);

    bool any_failure = false;
    for (std::size_t i = 0; i < n; ++i)
        if (!failures[i].empty()) {
            std::cerr << opt.inputs[i] << ": " << failures[i] << "\n";
            any_failure = true;
        }
    if (any_failure)
        return kExitData;

    const nlohmann::json doc = asiaudit::report_to_json(results);
    write_text(opt.out, doc.dump(2) + "\n");

    for (const auto& d : results)
        if (d.degenerate)
            return kExitDegenerate;
    return kExitOk;
}

struct SimulateOptions {
    std::string config_path;
    asiaudit::SimulationConfig config;
    std::string rest_mode = "mixed";
    std::string out;
};

int run_simulate(SimulateOptions& opt) {
    if (!opt.config_path.empty()) {
        std::ifstream in(opt.config_path);
        if (!in)
            throw asiaudit::DataError("file_error",
                                      "cannot open config: " + opt.config_path);
        nlohmann::json j = nlohmann::json::parse(in);
        opt.config = asiaudit::SimulationConfig::from_json(j);
    } else {
        opt.config.rest_mode = asiaudit::rest_mode_from_string(opt.rest_mode);
        opt.config.validate();
    }

    const asiaudit::Panel panel = asiaudit::simulate_panel(opt.config);
    asiaudit::write_csv(panel, opt.out);

    // sidecar metadata: config echo plus generation time (the CSV itself is
    // deterministic and timestamp-free)
    nlohmann::ordered_json meta;
    meta["config"] = opt.config.to_json();
    meta["records"] = panel.records.size();
    meta["generated_unix_ms"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(
            std::chrono::system_clock::now().time_since_epoch())
            .count();
    std::ofstream metaout(opt.out + ".meta.json");
    if (metaout)
        metaout << meta.dump(2) << "\n";

    if (log_level() == LogLevel::debug)
        std::cerr << "wrote " << panel.records.size() << " records to " << opt.out
                  << "\n";
    return kExitOk;
}

struct TableOptions {
    std::vector<std::string> inputs;
    std::string format = "text";
    std::string out;
};

int run_table(const TableOptions& opt) {
    const asiaudit::TableFormat format =
        asiaudit::table_format_from_string(opt.format);
    std::vector<asiaudit::AsiDiagnostic> diagnostics;
    for (const auto& path : opt.inputs) {
        std::ifstream in(path);
        if (!in)
            throw asiaudit::DataError("file_error", "cannot open report: " + path);
        nlohmann::json doc = nlohmann::json::parse(in);
        for (auto& d : asiaudit::report_from_json(doc))
            diagnostics.push_back(std::move(d));
    }
    if (diagnostics.empty())
        throw asiaudit::DataError("empty_report", "no diagnostics in inputs");
    write_text(opt.out, asiaudit::render_table(diagnostics, format));
    return kExitOk;
}

struct CheckOptions {
    std::string input;
    std::string schema = "flow";
};

int run_check(const CheckOptions& opt) {
    asiaudit::DiagnosticsLog log;
    const asiaudit::SchemaMode mode = opt.schema == "level"
                                          ? asiaudit::SchemaMode::level
                                          : asiaudit::SchemaMode::flow;
    asiaudit::Panel panel = asiaudit::ingest_csv(opt.input, mode, &log);
    if (panel.schema_mode == asiaudit::SchemaMode::level)
        panel = asiaudit::difference_panel(panel, &log);
    panel = asiaudit::derive_delta_totals(panel, 1e-6, &log);
    for (const auto& record : panel.records)
        asiaudit::compute_rest(record, 1e-6, &log);

    std::cerr << log.to_json_lines();
    const std::size_t violations = log.count(asiaudit::diag::identity_violation);
    std::cout << "records: " << panel.records.size()
              << ", identity_violations: " << violations << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Accounting-identity audit for investment-cash flow regressions"};
    app.require_subcommand(1);

    DiagnoseOptions diag_opt;
    auto* diagnose = app.add_subcommand(
        "diagnose", "Run the restricted/unrestricted audit on CSV panels");
    diagnose->add_option("--input", diag_opt.inputs, "input CSV path(s)")
        ->required()
        ->expected(-1);
    diagnose->add_option("--schema", diag_opt.schema, "input schema")
        ->check(CLI::IsMember({"flow", "level"}));
    diagnose->add_option("--scale", diag_opt.scale, "total-assets scaling base")
        ->check(CLI::IsMember({"lagged", "current"}));
    diagnose->add_option("--trim", diag_opt.trim,
                         "pooled trim fraction per tail (default 0.01)");
    diagnose->add_option("--out", diag_opt.out, "report JSON path (default stdout)");
    diagnose->add_option("--jobs", diag_opt.jobs,
                         "concurrent panel diagnoses (output order is fixed)");

    SimulateOptions sim_opt;
    auto* simulate = app.add_subcommand(
        "simulate", "Generate a seeded synthetic panel CSV");
    simulate->add_option("--config", sim_opt.config_path,
                         "JSON config (overrides the flags below)");
    simulate->add_option("--firms", sim_opt.config.n_firms, "number of firms");
    simulate->add_option("--years", sim_opt.config.n_years,
                         "balance-sheet dates per firm (records = years - 1)");
    simulate->add_option("--seed", sim_opt.config.seed, "64-bit seed");
    simulate->add_option("--rest-mode", sim_opt.rest_mode, "identity-rest regime")
        ->check(CLI::IsMember({"zero", "all_positive", "all_negative_small",
                               "all_negative_large", "mixed"}));
    simulate->add_option("--rest-scale", sim_opt.config.rest_scale,
                         "rest magnitude relative to cash flow");
    simulate->add_option("--mix-fraction", sim_opt.config.mix_fraction,
                         "positive-rest probability in mixed mode");
    simulate->add_option("--cf-location", sim_opt.config.cf_location,
                         "median scaled cash flow");
    simulate->add_option("--cf-spread", sim_opt.config.cf_spread,
                         "log-space spread of cash flow");
    simulate->add_option("--base-assets", sim_opt.config.base_assets_location,
                         "initial total-assets scale");
    simulate->add_option("--label", sim_opt.config.label, "panel provenance label");
    simulate->add_option("--out", sim_opt.out, "output CSV path")->required();

    TableOptions table_opt;
    auto* table = app.add_subcommand("table", "Render audit reports as a table");
    table->add_option("--inputs", table_opt.inputs, "report JSON path(s)")
        ->required()
        ->expected(-1);
    table->add_option("--format", table_opt.format, "output format")
        ->check(CLI::IsMember({"text", "csv", "json", "markdown"}));
    table->add_option("--out", table_opt.out, "output path (default stdout)");

    CheckOptions check_opt;
    auto* check = app.add_subcommand(
        "check", "Scan a CSV panel for accounting-identity violations");
    check->add_option("--input", check_opt.input, "input CSV path")->required();
    check->add_option("--schema", check_opt.schema, "input schema")
        ->check(CLI::IsMember({"flow", "level"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (app.got_subcommand(diagnose))
            return run_diagnose(diag_opt);
        if (app.got_subcommand(simulate))
            return run_simulate(sim_opt);
        if (app.got_subcommand(table))
            return run_table(table_opt);
        if (app.got_subcommand(check))
            return run_check(check_opt);
    } catch (const asiaudit::Error& e) {
        emit_error(e);
        return kExitData;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "{\"code\":\"json_error\",\"message\":\"" << e.what() << "\"}\n";
        return kExitData;
    }
    return kExitUsage;
}
