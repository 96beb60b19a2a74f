// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <fstream>

#include "homeres/io.hpp"
#include "homeres/scenario.hpp"

using namespace homeres;
using namespace homeres::scenario;

namespace {

// One-day scenario with a short horizon keeps unit runs quick; the 7-day
// defaults are exercised by the acceptance suite.
ScenarioConfig quick_cfg(ControllerKind ctrl) {
  ScenarioConfig cfg;
  cfg.controller = ctrl;
  cfg.duration_days = 1.0;
  cfg.mpc.n_steps = 6;
  cfg.rule_based.n_steps = 6;
  return cfg;
}

}  // namespace

TEST_CASE("scenario: secondary profile follows the occupant schedule") {
  plant::SystemConfig sys;
  const double dt = 1.0 / 6.0;
  CHECK(secondary_demand_at(sys, 20.0, dt) == Catch::Approx(8.0));
  CHECK(secondary_demand_at(sys, 22.0, dt) == Catch::Approx(51.0 + 1.0 / 3.0));
  CHECK(secondary_demand_at(sys, 12.0, dt) == 0.0);
  CHECK(secondary_demand_at(sys, 18.0, dt) == Catch::Approx(8.0));
  CHECK(secondary_demand_at(sys, 21.0, dt) == Catch::Approx(51.0 + 1.0 / 3.0));
  CHECK(secondary_demand_at(sys, 8.5, dt) == Catch::Approx(260.0 * dt));
  CHECK(secondary_demand_at(sys, 9.0, dt) == 0.0);

  const auto profile = build_secondary_profile(2, sys, dt);
  REQUIRE(profile.size() == 288);
  CHECK(profile[0] == Catch::Approx(260.0 * dt));            // 00:00, fans on
  CHECK(profile[144 + 120] == Catch::Approx(8.0));           // 20:00 next day
  CHECK(profile[72] == 0.0);                                 // 12:00
}

TEST_CASE("scenario: synthetic weather has lead, margin and a storm") {
  SyntheticWeatherConfig synth;
  const DateTime start = DateTime::from_civil(2017, 9, 11);
  const auto recs = synthetic_weather(start, 7.0, synth);
  REQUIRE(!recs.empty());
  CHECK(recs.front().timestamp == start.plus_hours(-24.0));
  CHECK(recs.back().timestamp >= start.plus_hours((7.0 + 1.0) * 24.0 - 1.0));
  double peak = 0.0;
  for (const auto& r : recs) {
    CHECK(r.ghi >= 0.0);
    peak = std::max(peak, r.ghi);
    const double rel_h =
        static_cast<double>(r.timestamp.epoch_seconds() - start.epoch_seconds()) / 3600.0;
    if (rel_h >= synth.storm_start_hours && rel_h < synth.storm_end_hours) {
      CHECK(r.ghi <= synth.storm_depth * synth.g_peak + 1e-9);
    }
  }
  CHECK(peak == Catch::Approx(synth.g_peak).margin(5.0));
}

TEST_CASE("scenario: size presets scale the battery bank") {
  plant::SystemConfig base;
  const auto a = apply_size_preset(base, 'A');
  CHECK(a.n_pv == 3);
  CHECK(a.e_bat_max == 5400.0);
  CHECK(a.e_bat_min == 1080.0);
  const auto b = apply_size_preset(base, 'B');
  CHECK(b.n_pv == 3);
  CHECK(b.e_bat_max == 10800.0);
  CHECK(b.e_bat_c_max == 1620.0);
  const auto f = apply_size_preset(base, 'F');
  CHECK(f.n_pv == 6);
  CHECK(f.e_bat_max == 10800.0);
  CHECK_THROWS_AS(apply_size_preset(base, 'Z'), std::invalid_argument);
}

TEST_CASE("scenario: baseline day completes with clean accounting") {
  const auto cfg = quick_cfg(ControllerKind::Baseline);
  const auto res = run_scenario(cfg);
  CHECK(res.trace.rows.size() == 144);
  const auto audit = metrics::audit_trace(res.trace, effective_system(cfg));
  INFO(audit.first_failure);
  CHECK(audit.ok);
  CHECK(res.report.solver_success_pct == 100.0);
}

TEST_CASE("scenario: rulebased day respects its budget") {
  auto cfg = quick_cfg(ControllerKind::RuleBased);
  const auto res = run_scenario(cfg);
  CHECK(res.trace.rows.size() == 144);
  const auto audit = metrics::audit_trace(res.trace, effective_system(cfg));
  INFO(audit.first_failure);
  CHECK(audit.ok);
  double fast_hours = 0.0;
  for (const auto& r : res.trace.rows) {
    if (r.cmd.x_bat == 2) fast_hours += res.trace.dt_hours;
  }
  CHECK(fast_hours <= cfg.rule_based.fast_charge_budget_hours + 1e-9);
}

TEST_CASE("scenario: mpc day solves every step and is reproducible") {
  const auto cfg = quick_cfg(ControllerKind::Mpc);
  const auto res1 = run_scenario(cfg);
  CHECK(res1.trace.rows.size() == 144);
  CHECK(res1.report.solver_success_pct == 100.0);
  const auto audit = metrics::audit_trace(res1.trace, effective_system(cfg));
  INFO(audit.first_failure);
  CHECK(audit.ok);

  const auto res2 = run_scenario(cfg);
  CHECK(trace_to_csv(res1.trace) == trace_to_csv(res2.trace));
}

TEST_CASE("scenario: persistence forecasts use the lead day") {
  auto cfg = quick_cfg(ControllerKind::Mpc);
  cfg.forecast = weather::ForecastMode::Persistence;
  const auto res = run_scenario(cfg);
  CHECK(res.trace.rows.size() == 144);
  CHECK(res.report.solver_success_pct == 100.0);
}

TEST_CASE("scenario: csv weather that misses the start is rejected") {
  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path() / "homeres_test_weather";
  fs::create_directories(dir);
  const auto path = (dir / "short.csv").string();
  {
    std::ofstream f(path);
    f << "ts,ghi,temp\n";
    DateTime t = DateTime::from_civil(2017, 9, 12);
    for (int i = 0; i < 24; ++i) {
      f << t.to_string() << ",100,25\n";
      t = t.plus_hours(1.0);
    }
  }
  auto cfg = quick_cfg(ControllerKind::Baseline);
  cfg.weather = path;
  CHECK_THROWS_AS(run_scenario(cfg), weather::InsufficientCoverage);
}

TEST_CASE("scenario: csv weather runs end to end") {
  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path() / "homeres_test_weather";
  fs::create_directories(dir);
  const auto path = (dir / "ok.csv").string();
  {
    const auto recs =
        synthetic_weather(DateTime::from_civil(2017, 9, 11), 1.0, SyntheticWeatherConfig{});
    std::ofstream f(path);
    f << "ts,ghi,temp\n";
    for (const auto& r : recs) {
      f << r.timestamp.to_string() << ',' << csv::fmt(r.ghi) << ',' << csv::fmt(r.ambient_temp)
        << "\n";
    }
  }
  auto cfg = quick_cfg(ControllerKind::Baseline);
  cfg.weather = path;
  const auto res = run_scenario(cfg);
  CHECK(res.trace.rows.size() == 144);
}

TEST_CASE("scenario: sweeps record cells and failures without aborting") {
  auto cfg = quick_cfg(ControllerKind::Baseline);
  const auto cells = sweep_sizes(cfg, "AB", {ControllerKind::Baseline});
  REQUIRE(cells.size() == 2);
  CHECK_FALSE(cells[0].failed);
  CHECK_FALSE(cells[1].failed);
  const auto csv_text = sweep_to_csv(cells, "size");
  CHECK(csv_text.find("size,controller") == 0);
  CHECK(csv_text.find("\nA,baseline,") != std::string::npos);

  // A horizon that does not divide into steps must be recorded as failed.
  const auto bad = sweep_horizon(cfg, {0.05}, {ControllerKind::RuleBased});
  REQUIRE(bad.size() == 1);
  CHECK(bad[0].failed);
}

TEST_CASE("scenario: fast-charge sweep runs the budget ladder") {
  auto cfg = quick_cfg(ControllerKind::RuleBased);
  const auto cells = sweep_fast_charge(cfg, {0.0, 2.0});
  REQUIRE(cells.size() == 2);
  for (const auto& c : cells) {
    INFO(c.error);
    CHECK_FALSE(c.failed);
  }
  CHECK(cells[0].max_daily_fast_charge_hours == 0.0);
}

TEST_CASE("scenario: config json round trip") {
  ScenarioConfig cfg;
  cfg.controller = ControllerKind::RuleBased;
  cfg.size_preset = "C";
  cfg.duration_days = 3.0;
  cfg.mpc.lambda4 = 12.5;
  cfg.synth.storm_depth = 0.1;
  const auto j = io::scenario_to_json(cfg);
  const auto back = io::scenario_from_json(j);
  CHECK(back.controller == ControllerKind::RuleBased);
  CHECK(back.size_preset == "C");
  CHECK(back.duration_days == 3.0);
  CHECK(back.mpc.lambda4 == 12.5);
  CHECK(back.synth.storm_depth == 0.1);
  CHECK(back.start == cfg.start);

  // Partial documents override only what they mention.
  const auto patched = io::scenario_from_json(nlohmann::json::parse(R"({"controller":"mpc"})"),
                                              back);
  CHECK(patched.controller == ControllerKind::Mpc);
  CHECK(patched.size_preset == "C");
}

TEST_CASE("scenario: run outputs land on disk") {
  namespace fs = std::filesystem;
  const auto dir = (fs::temp_directory_path() / "homeres_test_out").string();
  fs::remove_all(dir);
  auto cfg = quick_cfg(ControllerKind::Baseline);
  const auto res = run_scenario(cfg);
  const auto paths = io::write_run_outputs(res, cfg, dir);
  CHECK(fs::exists(paths.trace_csv));
  CHECK(fs::exists(paths.report_json));
  CHECK(fs::exists(paths.report_txt));
  std::ifstream f(paths.trace_csv);
  std::string header;
  std::getline(f, header);
  CHECK(header == trace_csv_header());
}
