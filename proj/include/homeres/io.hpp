// SPDX-License-Identifier: Apache-2.0
#pragma once

// JSON scenario configs, report serialization, and file emission. The JSON
// schema mirrors ScenarioConfig field for field; every key is optional and
// defaults to the built-in §-free scenario defaults.

#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "homeres/scenario.hpp"

namespace homeres::io {

using nlohmann::json;

inline scenario::ScenarioConfig scenario_from_json(const json& j,
                                                   scenario::ScenarioConfig cfg = {}) {
  cfg.weather = j.value("weather", cfg.weather);
  cfg.historical = j.value("historical", cfg.historical);
  if (j.contains("csv_columns")) {
    const auto& c = j.at("csv_columns");
    cfg.schema.timestamp_column = c.value("timestamp", cfg.schema.timestamp_column);
    cfg.schema.ghi_column = c.value("ghi", cfg.schema.ghi_column);
    cfg.schema.temp_column = c.value("temp", cfg.schema.temp_column);
  }
  if (j.contains("start")) cfg.start = DateTime::parse(j.at("start").get<std::string>());
  cfg.duration_days = j.value("duration_days", cfg.duration_days);
  cfg.dt_hours = j.value("dt_hours", cfg.dt_hours);
  if (j.contains("controller")) {
    cfg.controller = scenario::controller_from_string(j.at("controller").get<std::string>());
  }
  cfg.size_preset = j.value("size_preset", cfg.size_preset);
  if (j.contains("forecast")) {
    const auto f = j.at("forecast").get<std::string>();
    if (f == "perfect") {
      cfg.forecast = weather::ForecastMode::Perfect;
    } else if (f == "persistence") {
      cfg.forecast = weather::ForecastMode::Persistence;
    } else {
      throw std::invalid_argument("config: unknown forecast mode \"" + f + "\"");
    }
  }
  if (j.contains("initial")) {
    const auto& i = j.at("initial");
    cfg.e_bat0 = i.value("e_bat", cfg.e_bat0);
    cfg.t_fr0 = i.value("t_fr", cfg.t_fr0);
  }
  if (j.contains("house")) {
    const auto& h = j.at("house");
    if (h.contains("model")) cfg.house = scenario::house_from_string(h.at("model"));
    cfg.house_rc.r_h = h.value("r_h", cfg.house_rc.r_h);
    cfg.house_rc.c_h = h.value("c_h", cfg.house_rc.c_h);
    if (h.contains("statespace")) {
      const auto& ss = h.at("statespace");
      cfg.house_lss.n = ss.value("n", cfg.house_lss.n);
      cfg.house_lss.a = ss.value("a", cfg.house_lss.a);
      cfg.house_lss.b = ss.value("b", cfg.house_lss.b);
      cfg.house_lss.c = ss.value("c", cfg.house_lss.c);
      cfg.house_lss.d = ss.value("d", cfg.house_lss.d);
    }
  }
  if (j.contains("mpc")) {
    const auto& m = j.at("mpc");
    cfg.mpc.n_steps = m.value("n_steps", cfg.mpc.n_steps);
    cfg.mpc.lambda1 = m.value("lambda1", cfg.mpc.lambda1);
    cfg.mpc.lambda2 = m.value("lambda2", cfg.mpc.lambda2);
    cfg.mpc.lambda3 = m.value("lambda3", cfg.mpc.lambda3);
    cfg.mpc.lambda4 = m.value("lambda4", cfg.mpc.lambda4);
    cfg.mpc.gamma_min = m.value("gamma_min", cfg.mpc.gamma_min);
    cfg.mpc.gamma_max = m.value("gamma_max", cfg.mpc.gamma_max);
    cfg.mpc.eta_con = m.value("eta_con", cfg.mpc.eta_con);
    cfg.mpc.limits.max_nodes = m.value("node_cap", cfg.mpc.limits.max_nodes);
    cfg.mpc.limits.max_seconds = m.value("time_cap_seconds", cfg.mpc.limits.max_seconds);
    if (m.contains("house_pred")) {
      const auto hp = m.at("house_pred").get<std::string>();
      if (hp == "offset") {
        cfg.mpc.house_pred = mpc::HousePredMode::Offset;
      } else if (hp == "constant") {
        cfg.mpc.house_pred = mpc::HousePredMode::Constant;
      } else {
        throw std::invalid_argument("config: unknown house_pred \"" + hp + "\"");
      }
    }
  }
  if (j.contains("rule_based")) {
    const auto& r = j.at("rule_based");
    cfg.rule_based.n_steps = r.value("n_steps", cfg.rule_based.n_steps);
    cfg.rule_based.fast_charge_budget_hours =
        r.value("fast_charge_budget_hours", cfg.rule_based.fast_charge_budget_hours);
  }
  if (j.contains("system")) {
    const auto& s = j.at("system");
    auto& sys = cfg.system;
    sys.n_pv = s.value("n_pv", sys.n_pv);
    sys.p_pv_rated = s.value("p_pv_rated", sys.p_pv_rated);
    sys.g_std = s.value("g_std", sys.g_std);
    sys.e_bat_min = s.value("e_bat_min", sys.e_bat_min);
    sys.e_bat_max = s.value("e_bat_max", sys.e_bat_max);
    sys.e_bat_c_max = s.value("e_bat_c_max", sys.e_bat_c_max);
    sys.e_bat_dc_max = s.value("e_bat_dc_max", sys.e_bat_dc_max);
    sys.eta_c = s.value("eta_c", sys.eta_c);
    sys.eta_dc = s.value("eta_dc", sys.eta_dc);
    sys.eta_inv = s.value("eta_inv", sys.eta_inv);
    sys.fast_charge_multiplier = s.value("fast_charge_multiplier", sys.fast_charge_multiplier);
    sys.p_fr_rated = s.value("p_fr_rated", sys.p_fr_rated);
    sys.t_fr_min = s.value("t_fr_min", sys.t_fr_min);
    sys.t_fr_max = s.value("t_fr_max", sys.t_fr_max);
    sys.r_fr = s.value("r_fr", sys.r_fr);
    sys.c_fr = s.value("c_fr", sys.c_fr);
    sys.cop = s.value("cop", sys.cop);
    sys.n_lights = s.value("n_lights", sys.n_lights);
    sys.p_light = s.value("p_light", sys.p_light);
    sys.n_fans = s.value("n_fans", sys.n_fans);
    sys.p_fan = s.value("p_fan", sys.p_fan);
  }
  if (j.contains("synthetic")) {
    const auto& s = j.at("synthetic");
    auto& sy = cfg.synth;
    sy.g_peak = s.value("g_peak", sy.g_peak);
    sy.t_mean = s.value("t_mean", sy.t_mean);
    sy.t_amp = s.value("t_amp", sy.t_amp);
    sy.storm_start_hours = s.value("storm_start_hours", sy.storm_start_hours);
    sy.storm_end_hours = s.value("storm_end_hours", sy.storm_end_hours);
    sy.storm_depth = s.value("storm_depth", sy.storm_depth);
    sy.lead_days = s.value("lead_days", sy.lead_days);
    sy.margin_days = s.value("margin_days", sy.margin_days);
    sy.cadence_minutes = s.value("cadence_minutes", sy.cadence_minutes);
  }
  return cfg;
}

inline json scenario_to_json(const scenario::ScenarioConfig& cfg) {
  json j;
  j["weather"] = cfg.weather;
  j["historical"] = cfg.historical;
  j["csv_columns"] = {{"timestamp", cfg.schema.timestamp_column},
                      {"ghi", cfg.schema.ghi_column},
                      {"temp", cfg.schema.temp_column}};
  j["start"] = cfg.start.to_string();
  j["duration_days"] = cfg.duration_days;
  j["dt_hours"] = cfg.dt_hours;
  j["controller"] = scenario::to_string(cfg.controller);
  j["size_preset"] = cfg.size_preset;
  j["forecast"] = cfg.forecast == weather::ForecastMode::Perfect ? "perfect" : "persistence";
  j["initial"] = {{"e_bat", cfg.e_bat0}, {"t_fr", cfg.t_fr0}};
  j["house"] = {{"model", scenario::to_string(cfg.house)},
                {"r_h", cfg.house_rc.r_h},
                {"c_h", cfg.house_rc.c_h}};
  j["mpc"] = {{"n_steps", cfg.mpc.n_steps},
              {"lambda1", cfg.mpc.lambda1},
              {"lambda2", cfg.mpc.lambda2},
              {"lambda3", cfg.mpc.lambda3},
              {"lambda4", cfg.mpc.lambda4},
              {"gamma_min", cfg.mpc.gamma_min},
              {"gamma_max", cfg.mpc.gamma_max},
              {"eta_con", cfg.mpc.eta_con},
              {"house_pred",
               cfg.mpc.house_pred == mpc::HousePredMode::Offset ? "offset" : "constant"},
              {"node_cap", cfg.mpc.limits.max_nodes},
              {"time_cap_seconds", cfg.mpc.limits.max_seconds}};
  j["rule_based"] = {{"n_steps", cfg.rule_based.n_steps},
                     {"fast_charge_budget_hours", cfg.rule_based.fast_charge_budget_hours}};
  const auto& s = cfg.system;
  j["system"] = {{"n_pv", s.n_pv},
                 {"p_pv_rated", s.p_pv_rated},
                 {"g_std", s.g_std},
                 {"e_bat_min", s.e_bat_min},
                 {"e_bat_max", s.e_bat_max},
                 {"e_bat_c_max", s.e_bat_c_max},
                 {"e_bat_dc_max", s.e_bat_dc_max},
                 {"eta_c", s.eta_c},
                 {"eta_dc", s.eta_dc},
                 {"eta_inv", s.eta_inv},
                 {"fast_charge_multiplier", s.fast_charge_multiplier},
                 {"p_fr_rated", s.p_fr_rated},
                 {"t_fr_min", s.t_fr_min},
                 {"t_fr_max", s.t_fr_max},
                 {"r_fr", s.r_fr},
                 {"c_fr", s.c_fr},
                 {"cop", s.cop},
                 {"n_lights", s.n_lights},
                 {"p_light", s.p_light},
                 {"n_fans", s.n_fans},
                 {"p_fan", s.p_fan}};
  const auto& sy = cfg.synth;
  j["synthetic"] = {{"g_peak", sy.g_peak},
                    {"t_mean", sy.t_mean},
                    {"t_amp", sy.t_amp},
                    {"storm_start_hours", sy.storm_start_hours},
                    {"storm_end_hours", sy.storm_end_hours},
                    {"storm_depth", sy.storm_depth},
                    {"lead_days", sy.lead_days},
                    {"margin_days", sy.margin_days},
                    {"cadence_minutes", sy.cadence_minutes}};
  return j;
}

inline json report_to_json(const metrics::ResiliencyReport& r,
                           const scenario::ScenarioConfig& cfg) {
  json j;
  j["controller"] = scenario::to_string(cfg.controller);
  j["size_preset"] = cfg.size_preset;
  j["duration_days"] = cfg.duration_days;
  j["dt_hours"] = cfg.dt_hours;
  j["prm_hours_per_day"] = r.prm_hours_per_day;
  j["srm_pct"] = r.srm_pct;
  j["violation_hours"] = r.violation_hours;
  j["unserved_secondary_wh"] = r.unserved_secondary_wh;
  j["fast_charge_hours_used"] = r.fast_charge_hours_used;
  j["solver_success_pct"] = r.solver_success_pct;
  j["avg_solve_time_seconds"] = r.avg_solve_time_seconds;
  return j;
}

struct OutputPaths {
  std::string trace_csv;
  std::string report_json;
  std::string report_txt;
  std::string timings_csv;
};

inline OutputPaths write_run_outputs(const scenario::RunResult& result,
                                     const scenario::ScenarioConfig& cfg,
                                     const std::string& out_dir, bool write_timings = false) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  OutputPaths paths;
  paths.trace_csv = (fs::path(out_dir) / "trace.csv").string();
  paths.report_json = (fs::path(out_dir) / "report.json").string();
  paths.report_txt = (fs::path(out_dir) / "report.txt").string();
  {
    std::ofstream f(paths.trace_csv);
    f << trace_to_csv(result.trace);
  }
  {
    std::ofstream f(paths.report_json);
    f << report_to_json(result.report, cfg).dump(2) << "\n";
  }
  {
    std::ofstream f(paths.report_txt);
    f << metrics::to_kv_text(result.report);
  }
  if (write_timings && !result.solve_times.empty()) {
    paths.timings_csv = (fs::path(out_dir) / "timings.csv").string();
    std::ofstream f(paths.timings_csv);
    f << "step,solve_time_seconds\n";
    for (std::size_t k = 0; k < result.solve_times.size(); ++k) {
      f << k << ',' << csv::fmt(result.solve_times[k]) << "\n";
    }
  }
  return paths;
}

inline void write_weather_csv(const std::vector<weather::WeatherRecord>& recs,
                              const std::string& path) {
  std::ofstream f(path);
  f << "ts,ghi,temp\n";
  for (const auto& r : recs) {
    f << r.timestamp.to_string() << ',' << csv::fmt(r.ghi) << ',' << csv::fmt(r.ambient_temp)
      << "\n";
  }
}

// One CSV per day-of-year, columns (time_of_day, temp_c).
inline void export_historical_profiles(const weather::HistoricalProfileMap& profiles,
                                       double dt_hours, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  for (const auto& [doy, prof] : profiles) {
    char name[32];
    std::snprintf(name, sizeof name, "day_%03d.csv", doy);
    std::ofstream f(fs::path(out_dir) / name);
    f << "time_of_day,temp_c\n";
    for (std::size_t b = 0; b < prof.values.size(); ++b) {
      f << csv::fmt(static_cast<double>(b) * dt_hours) << ',' << csv::fmt(prof.values[b])
        << "\n";
    }
  }
}

}  // namespace homeres::io
