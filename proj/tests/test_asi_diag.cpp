#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "asiaudit/asi_diag.hpp"
#include "asiaudit/errors.hpp"
#include "asiaudit/synth.hpp"

using namespace asiaudit;

namespace {

Observation make_obs(double inv, double cf, const std::string& firm = "F",
                     int year = 2001) {
    Observation o;
    o.firm_id = firm;
    o.year = year;
    o.inv = inv;
    o.cf = cf;
    o.rest = inv - cf;
    o.dummy = sign_dummy(o.rest);
    o.ducf = o.dummy * o.cf;
    o.investment = inv;
    o.cash_flow = cf;
    return o;
}

double rel_err(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale > 0.0 ? std::abs(a - b) / scale : 0.0;
}

} // namespace

TEST_CASE("incremental_f hand arithmetic") {
    CHECK(incremental_f(10.0, 8.0, 1, 12, 3) == doctest::Approx(2.25).epsilon(1e-15));
    CHECK(incremental_f(8.0, 8.0, 1, 12, 3) == 0.0);
    // consistency check against a reference large-sample configuration: with
    // n - k = 7599 the statistic lands near 2447
    const double f = incremental_f(61500.0, 46519.0, 1, 7602, 3);
    CHECK(f == doctest::Approx(2447.19).epsilon(1e-4));
}

TEST_CASE("incremental_f rejects non-nested inputs") {
    CHECK_THROWS_AS(incremental_f(5.0, 8.0, 1, 12, 3), InvalidNestingError);
    CHECK_THROWS_AS(incremental_f(10.0, 0.0, 1, 12, 3), DomainError);
    CHECK_THROWS_AS(incremental_f(10.0, 8.0, 0, 12, 3), DomainError);
    CHECK_THROWS_AS(incremental_f(10.0, 8.0, 1, 3, 3), DomainError);
    // rounding-level inversion is treated as no improvement
    CHECK(incremental_f(8.0 * (1.0 - 1e-13), 8.0, 1, 12, 3) == 0.0);
}

TEST_CASE("delta_explanatory_power reference pairs") {
    CHECK(delta_explanatory_power(0.016, 0.255) ==
          doctest::Approx(0.9373).epsilon(5e-4));
    CHECK(delta_explanatory_power(0.080, 0.378) ==
          doctest::Approx(0.7884).epsilon(5e-4));
    CHECK(delta_explanatory_power(0.0, 0.135) == 1.0);
    CHECK_THROWS_AS(delta_explanatory_power(0.5, 0.0), DomainError);
    CHECK_THROWS_AS(delta_explanatory_power(0.5, 0.4), DomainError);
    CHECK_THROWS_AS(delta_explanatory_power(-0.1, 0.4), DomainError);
}

TEST_CASE("decomposition shares are aggregate ratios") {
    std::vector<Observation> obs;
    obs.push_back(make_obs(2.0, 5.0));
    obs.push_back(make_obs(1.0, 3.0));
    obs[0].d_total_assets = 10.0;
    obs[1].d_total_assets = 10.0;
    obs[0].d_total_funds = 10.0;
    obs[1].d_total_funds = 10.0;
    const DecompositionShares s = decomposition_shares(obs);
    CHECK(s.share_inv_dta == doctest::Approx(0.15).epsilon(1e-15));
    CHECK(s.share_cf_dtf == doctest::Approx(0.40).epsilon(1e-15));

    // full attribution
    std::vector<Observation> full;
    full.push_back(make_obs(4.0, 1.0));
    full[0].d_total_assets = 4.0;
    full[0].d_total_funds = 4.0;
    CHECK(decomposition_shares(full).share_inv_dta == doctest::Approx(1.0));

    std::vector<Observation> none;
    none.push_back(make_obs(1.0, 1.0));
    CHECK_THROWS_AS(decomposition_shares(none), ZeroDenominatorError);
}

TEST_CASE("run_restricted reproduces the five-point fixture") {
    // same numbers as the matrix-level fixture, routed through observations
    const double xs[] = {1, 2, 3, 4, 5};
    const double ys[] = {2, 3, 5, 4, 6};
    std::vector<Observation> obs;
    for (int i = 0; i < 5; ++i)
        obs.push_back(make_obs(ys[i], xs[i]));
    const RegressionResult r = run_restricted(obs);
    CHECK(r.coefficients[0] == doctest::Approx(1.3).epsilon(1e-12));
    CHECK(r.coefficients[1] == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(r.rss == doctest::Approx(1.9).epsilon(1e-12));
    CHECK(r.r2 == doctest::Approx(0.81).epsilon(1e-12));
}

TEST_CASE("restricted fit on a zero-rest panel recovers the identity") {
    SimulationConfig cfg;
    cfg.n_firms = 50;
    cfg.n_years = 5;
    cfg.seed = 21;
    cfg.rest_mode = RestMode::zero;
    const Panel panel = simulate_panel(cfg);

    PrepConfig prep;
    prep.trim_fraction = 0.0;
    const auto obs = build_observations(panel, prep).observations;
    const RegressionResult r = run_restricted(obs);
    CHECK(std::abs(r.coefficients[1] - 1.0) <= 1e-9);
    CHECK(r.r2 >= 1.0 - 1e-12);
}

TEST_CASE("proportional positive rest shifts the through-origin slope") {
    // rest = +0.5 * cf exactly: the no-intercept slope is exactly 1.5
    std::vector<Observation> obs;
    SplitMix64 rng(17);
    std::vector<double> cf_col, inv_col;
    for (int i = 0; i < 200; ++i) {
        const double cf = 0.05 + rng.uniform01();
        const Observation o = make_obs(1.5 * cf, cf);
        cf_col.push_back(o.cf);
        inv_col.push_back(o.inv);
        obs.push_back(o);
    }
    const RegressionResult fit = ols_fit({cf_col}, inv_col, false);
    CHECK(fit.coefficients[0] == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("unrestricted fit needs mixed dummies") {
    std::vector<Observation> mixed;
    SplitMix64 rng(3);
    for (int i = 0; i < 30; ++i) {
        const double cf = 0.1 + rng.uniform01();
        const double rest = (i % 2 == 0) ? 0.3 * cf : -0.3 * cf;
        mixed.push_back(make_obs(cf + rest, cf));
    }
    const RegressionResult u = run_unrestricted(mixed);
    CHECK(u.k == 3);
    CHECK(std::isfinite(u.coefficients[2]));

    std::vector<Observation> nonpos;
    for (int i = 0; i < 30; ++i) {
        const double cf = 0.1 + rng.uniform01();
        nonpos.push_back(make_obs(cf - 0.2 * cf, cf));
    }
    try {
        run_unrestricted(nonpos);
        FAIL("expected DegenerateDummyError");
    } catch (const DegenerateDummyError& e) {
        CHECK(e.reason() == DummyDegeneracy::all_nonpositive);
    }

    std::vector<Observation> pos;
    for (int i = 0; i < 30; ++i) {
        const double cf = 0.1 + rng.uniform01();
        pos.push_back(make_obs(cf + 0.2 * cf, cf));
    }
    try {
        run_unrestricted(pos);
        FAIL("expected DegenerateDummyError");
    } catch (const DegenerateDummyError& e) {
        CHECK(e.reason() == DummyDegeneracy::all_positive);
    }
}

namespace {

AsiDiagnostic diagnose_synthetic(RestMode mode, std::uint64_t seed,
                                 long long firms = 100, double rest_scale = 0.8) {
    SimulationConfig cfg;
    cfg.n_firms = firms;
    cfg.n_years = 6;
    cfg.seed = seed;
    cfg.rest_mode = mode;
    cfg.rest_scale = rest_scale;
    const Panel panel = simulate_panel(cfg);
    return diagnose(panel, PrepConfig{});
}

} // namespace

TEST_CASE("diagnose on a strong mixed panel rejects the restricted model") {
    const AsiDiagnostic d = diagnose_synthetic(RestMode::mixed, 42);
    CHECK_FALSE(d.degenerate);
    REQUIRE(d.unrestricted.has_value());
    REQUIRE(d.f_if.has_value());
    REQUIRE(d.f_if_pvalue.has_value());
    CHECK(*d.f_if_pvalue < 1e-6);
    REQUIRE(d.delta_power.has_value());
    CHECK(*d.delta_power > 0.5);
    CHECK(d.h1_rejected_at == 0.01);
    REQUIRE(d.share_inv_dta.has_value());
    REQUIRE(d.share_cf_dtf.has_value());
}

TEST_CASE("diagnose golden values for the seed-42 mixed fixture") {
    // frozen after verifying against the normal-equations oracle and the
    // t^2 == F_IF identity; the generating config and regeneration recipe
    // are recorded in the golden file's _provenance field
    std::ifstream in(std::string(ASIAUDIT_TEST_DATA) + "/diagnose_seed42.json");
    REQUIRE(in.good());
    const nlohmann::json golden = nlohmann::json::parse(in);

    const AsiDiagnostic d = diagnose_synthetic(RestMode::mixed, 42);
    const nlohmann::json now = diagnostic_to_json(d);
    CHECK(rel_err(now["f_if"].get<double>(), golden["f_if"].get<double>()) < 1e-12);
    CHECK(rel_err(now["delta_power"].get<double>(),
                  golden["delta_power"].get<double>()) < 1e-12);
    CHECK(rel_err(now["restricted"]["r2"].get<double>(),
                  golden["restricted"]["r2"].get<double>()) < 1e-12);
    CHECK(rel_err(now["unrestricted"]["coefficients"][2].get<double>(),
                  golden["unrestricted"]["coefficients"][2].get<double>()) < 1e-12);
    CHECK(now["n_observations"] == golden["n_observations"]);
}

TEST_CASE("diagnose flags zero-rest panels as degenerate") {
    const AsiDiagnostic d = diagnose_synthetic(RestMode::zero, 9);
    CHECK(d.degenerate);
    REQUIRE(d.degenerate_reason.has_value());
    CHECK(*d.degenerate_reason == DummyDegeneracy::all_nonpositive);
    CHECK_FALSE(d.unrestricted.has_value());
    CHECK_FALSE(d.f_if.has_value());
    CHECK(d.restricted.r2 >= 1.0 - 1e-12);
}

TEST_CASE("diagnose propagates empty panels") {
    Panel empty;
    empty.schema_mode = SchemaMode::flow;
    CHECK_THROWS_AS(diagnose(empty, PrepConfig{}), EmptyPanelError);
}

TEST_CASE("nesting identities hold across random diagnoses") {
    for (std::uint64_t seed = 100; seed < 112; ++seed) {
        const AsiDiagnostic d = diagnose_synthetic(RestMode::mixed, seed, 60, 0.5);
        if (d.degenerate)
            continue;
        const auto& u = *d.unrestricted;
        CHECK(u.rss <= d.restricted.rss * (1.0 + 1e-12));
        CHECK(u.r2 >= d.restricted.r2 - 1e-12);
        const double t_b2 = u.t_stats[2];
        CHECK(rel_err(*d.f_if, t_b2 * t_b2) < 1e-6);
    }
}

TEST_CASE("diagnosis is invariant to monetary rescaling") {
    SimulationConfig cfg;
    cfg.n_firms = 80;
    cfg.n_years = 5;
    cfg.seed = 314;
    cfg.rest_mode = RestMode::mixed;
    const Panel base = simulate_panel(cfg);
    const AsiDiagnostic d0 = diagnose(base, PrepConfig{});

    for (double lambda : {1e-3, 1e6}) {
        Panel scaled = base;
        for (auto& r : scaled.records) {
            r.total_assets *= lambda;
            r.investment *= lambda;
            r.cash_flow *= lambda;
            auto mul = [lambda](std::optional<double>& v) {
                if (v)
                    *v *= lambda;
            };
            mul(r.d_ltd);
            mul(r.d_capital_stock);
            mul(r.depreciation);
            mul(r.dividends);
            mul(r.d_working_capital);
            mul(r.d_ofa);
            mul(r.d_total_assets);
            mul(r.d_total_funds);
        }
        const AsiDiagnostic d1 = diagnose(scaled, PrepConfig{});
        CHECK(d1.n_observations == d0.n_observations);
        CHECK(rel_err(d1.restricted.r2, d0.restricted.r2) < 1e-9);
        CHECK(rel_err(*d1.f_if, *d0.f_if) < 1e-9);
        CHECK(rel_err(*d1.delta_power, *d0.delta_power) < 1e-9);
        CHECK(rel_err(*d1.share_inv_dta, *d0.share_inv_dta) < 1e-9);
        CHECK(rel_err(*d1.share_cf_dtf, *d0.share_cf_dtf) < 1e-9);
        CHECK(rel_err(d1.unrestricted->t_stats[2], d0.unrestricted->t_stats[2]) <
              1e-9);
    }
}

TEST_CASE("diagnostic JSON round trip") {
    const AsiDiagnostic d = diagnose_synthetic(RestMode::mixed, 77, 40);
    const AsiDiagnostic back = diagnostic_from_json(diagnostic_to_json(d));
    CHECK(back.label == d.label);
    CHECK(back.restricted.coefficients == d.restricted.coefficients);
    CHECK(back.restricted.rss == d.restricted.rss);
    CHECK(back.unrestricted->t_stats == d.unrestricted->t_stats);
    CHECK(back.f_if == d.f_if);
    CHECK(back.f_if_pvalue == d.f_if_pvalue);
    CHECK(back.delta_power == d.delta_power);
    CHECK(back.share_inv_dta == d.share_inv_dta);
    CHECK(back.h1_rejected_at == d.h1_rejected_at);
    CHECK(back.degenerate == d.degenerate);
    CHECK(back.n_observations == d.n_observations);
}
