// SPDX-License-Identifier: Apache-2.0
#pragma once

// Scenario configuration, closed-loop run orchestration, experiment sweeps
// (system size, planning horizon, fast-charge budget, house models), the
// bundled storm-week synthetic weather, and output emission.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "homeres/datetime.hpp"
#include "homeres/metrics.hpp"
#include "homeres/mpc.hpp"
#include "homeres/plant.hpp"
#include "homeres/rules.hpp"
#include "homeres/trace.hpp"
#include "homeres/weather.hpp"

namespace homeres::scenario {

enum class ControllerKind { Mpc, Baseline, RuleBased };
enum class HouseKind { TraceDriven, FirstOrderRC, LinearStateSpace };

inline const char* to_string(ControllerKind c) {
  switch (c) {
    case ControllerKind::Mpc: return "mpc";
    case ControllerKind::Baseline: return "baseline";
    case ControllerKind::RuleBased: return "rulebased";
  }
  return "?";
}

inline ControllerKind controller_from_string(const std::string& s) {
  if (s == "mpc") return ControllerKind::Mpc;
  if (s == "baseline") return ControllerKind::Baseline;
  if (s == "rulebased" || s == "rule-based") return ControllerKind::RuleBased;
  throw std::invalid_argument("scenario: unknown controller \"" + s + "\"");
}

inline const char* to_string(HouseKind h) {
  switch (h) {
    case HouseKind::TraceDriven: return "trace";
    case HouseKind::FirstOrderRC: return "rc";
    case HouseKind::LinearStateSpace: return "statespace";
  }
  return "?";
}

inline HouseKind house_from_string(const std::string& s) {
  if (s == "trace") return HouseKind::TraceDriven;
  if (s == "rc") return HouseKind::FirstOrderRC;
  if (s == "statespace") return HouseKind::LinearStateSpace;
  throw std::invalid_argument("scenario: unknown house model \"" + s + "\"");
}

// Clear-sky sinusoidal irradiance with a near-zero storm window and a
// sinusoidal diurnal ambient temperature. Always generates a lead day of
// history before sim start (for persistence forecasts) and a margin after
// sim end (for the final receding horizons).
struct SyntheticWeatherConfig {
  double g_peak = 1000.0;      // W/m2 clear-sky noon irradiance
  double t_mean = 29.0;        // degC diurnal mean
  double t_amp = 5.0;          // degC diurnal half-swing
  double storm_start_hours = 30.0;  // relative to sim start
  double storm_end_hours = 72.0;
  double storm_depth = 0.25;   // irradiance multiplier inside the storm
  double lead_days = 1.0;
  double margin_days = 1.0;
  double cadence_minutes = 10.0;
};

inline std::vector<weather::WeatherRecord> synthetic_weather(DateTime sim_start,
                                                             double duration_days,
                                                             const SyntheticWeatherConfig& s) {
  std::vector<weather::WeatherRecord> recs;
  const std::int64_t cadence_s = static_cast<std::int64_t>(std::llround(s.cadence_minutes * 60));
  const std::int64_t t0 =
      sim_start.epoch_seconds() - static_cast<std::int64_t>(std::llround(s.lead_days * 86400));
  const std::int64_t t1 =
      sim_start.epoch_seconds() +
      static_cast<std::int64_t>(std::llround((duration_days + s.margin_days) * 86400));
  constexpr double pi = 3.14159265358979323846;
  for (std::int64_t t = t0; t <= t1; t += cadence_s) {
    weather::WeatherRecord r;
    r.timestamp = DateTime{t};
    const double h = r.timestamp.hour_of_day();
    const double rel_h = static_cast<double>(t - sim_start.epoch_seconds()) / 3600.0;
    double ghi = 0.0;
    if (h >= 6.0 && h <= 18.0) ghi = s.g_peak * std::sin(pi * (h - 6.0) / 12.0);
    if (rel_h >= s.storm_start_hours && rel_h < s.storm_end_hours) ghi *= s.storm_depth;
    r.ghi = std::max(ghi, 0.0);
    r.ambient_temp = s.t_mean + s.t_amp * std::sin(2.0 * pi * (h - 9.0) / 24.0);
    recs.push_back(r);
  }
  return recs;
}

// Occupant schedule: LED lights 18:00-24:00, fans 21:00-09:00.
inline double secondary_demand_at(const plant::SystemConfig& sys, double hour_of_day,
                                  double dt_hours) {
  double watts = 0.0;
  if (hour_of_day >= 18.0 && hour_of_day < 24.0) watts += sys.secondary_lights_w();
  if (hour_of_day >= 21.0 || hour_of_day < 9.0) watts += sys.secondary_fans_w();
  return watts * dt_hours;
}

inline std::vector<double> build_secondary_profile(int n_days, const plant::SystemConfig& sys,
                                                   double dt_hours) {
  const std::size_t per_day = static_cast<std::size_t>(std::llround(24.0 / dt_hours));
  std::vector<double> out;
  out.reserve(per_day * static_cast<std::size_t>(n_days));
  for (int d = 0; d < n_days; ++d) {
    for (std::size_t k = 0; k < per_day; ++k) {
      out.push_back(secondary_demand_at(sys, static_cast<double>(k) * dt_hours, dt_hours));
    }
  }
  return out;
}

inline void fill_secondary_demand(weather::ExogenousTrace& trace,
                                  const plant::SystemConfig& sys) {
  for (std::size_t k = 0; k < trace.size(); ++k) {
    trace.secondary_demand[k] =
        secondary_demand_at(sys, trace.time_at(k).hour_of_day(), trace.dt_hours);
  }
}

// Table of PV panel count and battery unit count per size label. Two battery
// units are the reference bank; all four battery quantities scale with the
// unit count.
struct SizePreset {
  char label;
  int n_pv;
  int battery_units;
};

inline const std::vector<SizePreset>& size_presets() {
  static const std::vector<SizePreset> presets = {
      {'A', 3, 2}, {'B', 3, 4}, {'C', 4, 2}, {'D', 4, 4}, {'E', 5, 4}, {'F', 6, 4},
  };
  return presets;
}

inline plant::SystemConfig apply_size_preset(plant::SystemConfig base, char label) {
  for (const auto& p : size_presets()) {
    if (p.label == label) {
      base.n_pv = p.n_pv;
      const double scale = static_cast<double>(p.battery_units) / 2.0;
      base.e_bat_max = 5400.0 * scale;
      base.e_bat_min = 1080.0 * scale;
      base.e_bat_c_max = 810.0 * scale;
      base.e_bat_dc_max = 844.5 * scale;
      return base;
    }
  }
  throw std::invalid_argument(std::string("scenario: unknown size preset '") + label + "'");
}

struct ScenarioConfig {
  std::string weather = "synthetic";  // file path or "synthetic"
  std::string historical = "same";    // file path, "same" as weather
  weather::CsvSchema schema;
  DateTime start = DateTime::from_civil(2017, 9, 11);
  double duration_days = 7.0;
  double dt_hours = 1.0 / 6.0;
  ControllerKind controller = ControllerKind::Mpc;
  mpc::MpcConfig mpc;
  rules::RuleBasedConfig rule_based;
  plant::SystemConfig system;
  std::string size_preset = "A";  // A..F or "custom" to keep `system` as-is
  double e_bat0 = -1.0;           // <0 means full battery
  double t_fr0 = 2.0;
  HouseKind house = HouseKind::FirstOrderRC;
  plant::HouseFirstOrderRC house_rc;
  plant::HouseLinearStateSpace house_lss;
  weather::ForecastMode forecast = weather::ForecastMode::Perfect;
  SyntheticWeatherConfig synth;
  std::string dump_lp_path;  // first horizon problem, when non-empty
};

inline plant::SystemConfig effective_system(const ScenarioConfig& cfg) {
  plant::SystemConfig sys = cfg.system;
  if (cfg.size_preset.size() == 1 && cfg.size_preset[0] >= 'A' && cfg.size_preset[0] <= 'F') {
    sys = apply_size_preset(sys, cfg.size_preset[0]);
  } else if (cfg.size_preset != "custom") {
    throw std::invalid_argument("scenario: size_preset must be A..F or custom");
  }
  sys.validate();
  return sys;
}

struct RunResult {
  RunTrace trace;
  metrics::ResiliencyReport report;
  std::vector<double> solve_times;  // per MPC step, empty for rule controllers
};

namespace detail {

inline std::vector<weather::WeatherRecord> load_weather(const ScenarioConfig& cfg,
                                                        const std::string& source,
                                                        double duration_days) {
  if (source == "synthetic") {
    return synthetic_weather(cfg.start, duration_days, cfg.synth);
  }
  std::ifstream in(source);
  if (!in) throw std::runtime_error("scenario: cannot open weather file " + source);
  return weather::parse_weather_csv(in, cfg.schema);
}

}  // namespace detail

inline RunResult run_scenario(const ScenarioConfig& cfg) {
  const plant::SystemConfig sys = effective_system(cfg);
  const double dt = cfg.dt_hours;
  if (dt <= 0 || cfg.duration_days <= 0) {
    throw std::invalid_argument("scenario: duration and dt must be positive");
  }
  const double steps_real = cfg.duration_days * 24.0 / dt;
  const std::size_t steps = static_cast<std::size_t>(std::llround(steps_real));
  if (std::abs(steps_real - static_cast<double>(steps)) > 1e-9 || steps == 0) {
    throw std::invalid_argument("scenario: duration must be a whole number of steps");
  }

  mpc::MpcConfig mpc_cfg = cfg.mpc;
  mpc_cfg.dt_hours = dt;
  rules::RuleBasedConfig rb_cfg = cfg.rule_based;
  rb_cfg.dt_hours = dt;

  std::size_t horizon = 0;
  if (cfg.controller == ControllerKind::Mpc) horizon = static_cast<std::size_t>(mpc_cfg.n_steps);
  if (cfg.controller == ControllerKind::RuleBased) {
    horizon = static_cast<std::size_t>(rb_cfg.n_steps);
  }

  const auto records = detail::load_weather(cfg, cfg.weather, cfg.duration_days);
  weather::ExogenousTrace trace = weather::resample(records, dt);
  fill_secondary_demand(trace, sys);

  const std::int64_t dt_s = static_cast<std::int64_t>(std::llround(dt * 3600.0));
  const std::int64_t offset_s = cfg.start.epoch_seconds() - trace.start.epoch_seconds();
  if (offset_s < 0 || offset_s % dt_s != 0) {
    throw weather::InsufficientCoverage{"weather does not cover the start time " +
                                        cfg.start.to_string()};
  }
  const std::size_t base = static_cast<std::size_t>(offset_s / dt_s);
  if (base + steps + horizon > trace.size()) {
    throw weather::InsufficientCoverage{
        "need " + std::to_string(base + steps + horizon) + " steps from " +
        trace.start.to_string() + ", have " + std::to_string(trace.size())};
  }
  const std::size_t steps_per_day = static_cast<std::size_t>(std::llround(24.0 / dt));
  if (cfg.forecast == weather::ForecastMode::Persistence && base < steps_per_day) {
    throw weather::InsufficientCoverage{"persistence forecasts need 24 h of weather history"};
  }

  weather::HistoricalProfileMap hist;
  if (cfg.controller != ControllerKind::Baseline) {
    const auto hist_records = cfg.historical == "same"
                                  ? records
                                  : detail::load_weather(cfg, cfg.historical, cfg.duration_days);
    hist = weather::build_historical_profile(hist_records, dt);
  }

  plant::HouseModel house;
  switch (cfg.house) {
    case HouseKind::TraceDriven: house = plant::HouseTraceDriven{}; break;
    case HouseKind::FirstOrderRC: house = cfg.house_rc; break;
    case HouseKind::LinearStateSpace: house = cfg.house_lss; break;
  }

  const plant::FridgeDiscretization disc = plant::discretize_fridge(sys, dt);
  const double e_bat0 = cfg.e_bat0 < 0 ? sys.e_bat_max : cfg.e_bat0;
  plant::PlantState state =
      plant::initial_state(sys, house, e_bat0, cfg.t_fr0, trace.ambient_temp[base]);

  std::optional<mpc::MpcController> mpc_ctrl;
  std::optional<rules::RuleBasedController> rb_ctrl;
  std::optional<rules::BaselineController> bl_ctrl;
  switch (cfg.controller) {
    case ControllerKind::Mpc: mpc_ctrl.emplace(mpc_cfg, sys); break;
    case ControllerKind::RuleBased: rb_ctrl.emplace(rb_cfg, sys); break;
    case ControllerKind::Baseline: bl_ctrl.emplace(sys, dt); break;
  }

  RunResult result;
  result.trace.dt_hours = dt;
  result.trace.rows.reserve(steps);

  std::vector<double> e_pv_fc(horizon), e_s_fc(horizon);
  for (std::size_t k = 0; k < steps; ++k) {
    const std::size_t abs = base + k;
    const DateTime now = trace.time_at(abs);
    const double ghi_now = trace.ghi[abs];
    const double ambient = trace.ambient_temp[abs];
    const double e_s_now = trace.secondary_demand[abs];
    const double t_house_meas = plant::house_output(house, state, ambient);

    plant::ControlCommand cmd;
    std::optional<mpc::MpcDiagnostics> diag;
    if (cfg.controller == ControllerKind::Baseline) {
      cmd = bl_ctrl->decide(state, plant::pv_energy(sys, ghi_now, dt), e_s_now);
    } else {
      const auto ghi_fc = weather::forecast_irradiance(trace, abs, horizon, cfg.forecast);
      for (std::size_t i = 0; i < horizon; ++i) {
        e_pv_fc[i] = plant::pv_energy(sys, ghi_fc[i], dt);
        e_s_fc[i] = trace.secondary_demand[abs + i];
      }
      const auto hist_slice =
          weather::slice_profile(hist, now, dt, horizon);
      if (cfg.controller == ControllerKind::Mpc) {
        auto [c, d] = mpc_ctrl->control_step(state.e_bat, state.t_fr, t_house_meas, e_pv_fc,
                                             e_s_fc, hist_slice);
        cmd = c;
        diag = d;
        result.solve_times.push_back(d.solve_time_seconds);
        if (k == 0 && !cfg.dump_lp_path.empty()) {
          std::ofstream lp(cfg.dump_lp_path);
          lp << milp::to_lp_format(mpc_ctrl->last_problem());
        }
      } else {
        const auto house_pred = mpc::predict_house_temp(
            t_house_meas, hist_slice, static_cast<int>(horizon), mpc_cfg.house_pred);
        auto [c, rep] = rb_ctrl->decide(state, now, plant::pv_energy(sys, ghi_now, dt), e_s_now,
                                        e_pv_fc, e_s_fc, house_pred.values);
        cmd = c;
        (void)rep;
      }
    }

    TraceRow row;
    row.step = static_cast<long>(k);
    row.timestamp = now;
    row.t_fr_before = state.t_fr;
    row.latch_before = state.compressor_on;
    row.cmd = cmd;
    auto [next, acct] = plant::step(state, cmd, ghi_now, e_s_now, ambient, sys, disc, house, dt);
    row.acct = acct;
    row.t_fr_after = next.t_fr;
    row.e_bat_after = next.e_bat;
    row.latch_after = next.compressor_on;
    row.diag = diag;
    result.trace.rows.push_back(std::move(row));
    state = next;
  }

  result.report = metrics::summarize(result.trace, sys);
  return result;
}

// ---------------------------------------------------------------------------
// Sweeps. Per-cell failures are recorded in the row and the sweep continues.

struct SweepCell {
  std::string key;
  ControllerKind controller = ControllerKind::Mpc;
  metrics::ResiliencyReport report;
  double max_daily_fast_charge_hours = 0.0;
  bool failed = false;
  std::string error;
};

namespace detail {

inline double max_daily_fast_hours(const RunTrace& trace) {
  std::map<std::int64_t, double> per_day;
  for (const auto& r : trace.rows) {
    if (r.cmd.x_bat == 2) per_day[r.timestamp.day_index()] += trace.dt_hours;
  }
  double mx = 0.0;
  for (const auto& [_, h] : per_day) mx = std::max(mx, h);
  return mx;
}

inline SweepCell run_cell(const ScenarioConfig& cfg, std::string key) {
  SweepCell cell;
  cell.key = std::move(key);
  cell.controller = cfg.controller;
  try {
    const RunResult res = run_scenario(cfg);
    cell.report = res.report;
    cell.max_daily_fast_charge_hours = max_daily_fast_hours(res.trace);
  } catch (const std::exception& e) {
    cell.failed = true;
    cell.error = e.what();
  }
  return cell;
}

}  // namespace detail

inline std::vector<SweepCell> sweep_sizes(
    const ScenarioConfig& base, const std::string& labels = "ABCDEF",
    const std::vector<ControllerKind>& controllers = {
        ControllerKind::Mpc, ControllerKind::Baseline, ControllerKind::RuleBased}) {
  std::vector<SweepCell> out;
  for (char label : labels) {
    for (ControllerKind ctrl : controllers) {
      ScenarioConfig cfg = base;
      cfg.size_preset = std::string(1, label);
      cfg.controller = ctrl;
      out.push_back(detail::run_cell(cfg, std::string(1, label)));
    }
  }
  return out;
}

inline std::vector<SweepCell> sweep_horizon(
    const ScenarioConfig& base, const std::vector<double>& horizon_hours = {1, 3, 6, 12, 24},
    const std::vector<ControllerKind>& controllers = {ControllerKind::Mpc,
                                                      ControllerKind::RuleBased}) {
  std::vector<SweepCell> out;
  for (double hours : horizon_hours) {
    const double n_real = hours / base.dt_hours;
    const int n = static_cast<int>(std::llround(n_real));
    for (ControllerKind ctrl : controllers) {
      ScenarioConfig cfg = base;
      cfg.controller = ctrl;
      if (std::abs(n_real - n) > 1e-9 || n < 1) {
        SweepCell cell;
        cell.key = csv::fmt(hours);
        cell.controller = ctrl;
        cell.failed = true;
        cell.error = "horizon not a whole number of steps";
        out.push_back(cell);
        continue;
      }
      cfg.mpc.n_steps = n;
      cfg.rule_based.n_steps = n;
      out.push_back(detail::run_cell(cfg, csv::fmt(hours)));
    }
  }
  return out;
}

inline std::vector<SweepCell> sweep_fast_charge(const ScenarioConfig& base,
                                                const std::vector<double>& budgets = {1, 2, 3, 4,
                                                                                      5, 6}) {
  std::vector<SweepCell> out;
  for (double budget : budgets) {
    ScenarioConfig cfg = base;
    cfg.controller = ControllerKind::RuleBased;
    cfg.rule_based.fast_charge_budget_hours = budget;
    out.push_back(detail::run_cell(cfg, csv::fmt(budget)));
  }
  return out;
}

inline std::vector<SweepCell> compare_house_models(
    const ScenarioConfig& base,
    const std::vector<HouseKind>& kinds = {HouseKind::TraceDriven, HouseKind::FirstOrderRC}) {
  std::vector<SweepCell> out;
  for (HouseKind kind : kinds) {
    ScenarioConfig cfg = base;
    cfg.controller = ControllerKind::Mpc;
    cfg.house = kind;
    out.push_back(detail::run_cell(cfg, to_string(kind)));
  }
  return out;
}

inline std::string sweep_to_csv(const std::vector<SweepCell>& cells,
                                const std::string& key_name) {
  std::string out = key_name +
                    ",controller,prm_hours_per_day,srm_pct,solver_success_pct,"
                    "avg_solve_time_seconds,max_daily_fast_charge_hours,status\n";
  for (const auto& c : cells) {
    out += c.key;
    out += ',';
    out += to_string(c.controller);
    out += ',';
    if (c.failed) {
      out += ",,,,,failed: " + c.error + "\n";
    } else {
      out += csv::fmt(c.report.prm_hours_per_day) + ',' + csv::fmt(c.report.srm_pct) + ',' +
             csv::fmt(c.report.solver_success_pct) + ',' +
             csv::fmt(c.report.avg_solve_time_seconds) + ',' +
             csv::fmt(c.max_daily_fast_charge_hours) + ",ok\n";
    }
  }
  return out;
}

}  // namespace homeres::scenario
