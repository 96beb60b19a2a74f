// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: scenario runs, the experiment sweeps, solver
// self-validation, and profile/trace generation.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "homeres/homeres.hpp"

namespace {

using namespace homeres;

struct CommonOpts {
  std::string config_path;
  std::string weather;
  std::string historical;
  std::string start;
  std::string controller;
  std::string preset;
  std::string house;
  std::string forecast;
  std::string house_pred;
  double duration_days = -1;
  double dt_minutes = -1;
  int horizon_steps = -1;
  double budget_hours = -1;
  double e_bat0 = -2;
  double t_fr0 = std::numeric_limits<double>::quiet_NaN();
  double storm_depth = -1;
  double storm_start_hours = -1;
  double storm_end_hours = -1;
};

void add_common_flags(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path, "Scenario config JSON (flags override it)");
  cmd->add_option("--weather", o.weather, "Weather CSV path or 'synthetic'");
  cmd->add_option("--historical", o.historical,
                  "Historical-temperature weather CSV path, or 'same'");
  cmd->add_option("--start", o.start, "Simulation start (ISO-8601)");
  cmd->add_option("--days", o.duration_days, "Simulation length in days");
  cmd->add_option("--dt-minutes", o.dt_minutes, "Step length in minutes");
  cmd->add_option("--controller", o.controller, "mpc | baseline | rulebased");
  cmd->add_option("--preset", o.preset, "System size preset A..F, or 'custom'");
  cmd->add_option("--house", o.house, "House model: trace | rc | statespace");
  cmd->add_option("--forecast", o.forecast, "perfect | persistence");
  cmd->add_option("--house-pred", o.house_pred, "MPC house predictor: offset | constant");
  cmd->add_option("--horizon-steps", o.horizon_steps, "Planning horizon in steps");
  cmd->add_option("--budget-hours", o.budget_hours, "Rule-Based fast-charge hours per day");
  cmd->add_option("--e-bat0", o.e_bat0, "Initial battery energy in Wh (-1 for full)");
  cmd->add_option("--t-fr0", o.t_fr0, "Initial fridge temperature in degC");
  cmd->add_option("--storm-depth", o.storm_depth, "Synthetic storm irradiance multiplier");
  cmd->add_option("--storm-start-hours", o.storm_start_hours,
                  "Synthetic storm start, hours after sim start");
  cmd->add_option("--storm-end-hours", o.storm_end_hours,
                  "Synthetic storm end, hours after sim start");
}

scenario::ScenarioConfig resolve_config(const CommonOpts& o) {
  scenario::ScenarioConfig cfg;
  if (!o.config_path.empty()) {
    std::ifstream f(o.config_path);
    if (!f) throw std::runtime_error("cannot open config " + o.config_path);
    nlohmann::json j;
    f >> j;
    cfg = io::scenario_from_json(j, cfg);
  }
  if (!o.weather.empty()) cfg.weather = o.weather;
  if (!o.historical.empty()) cfg.historical = o.historical;
  if (!o.start.empty()) cfg.start = DateTime::parse(o.start);
  if (o.duration_days > 0) cfg.duration_days = o.duration_days;
  if (o.dt_minutes > 0) cfg.dt_hours = o.dt_minutes / 60.0;
  if (!o.controller.empty()) cfg.controller = scenario::controller_from_string(o.controller);
  if (!o.preset.empty()) cfg.size_preset = o.preset;
  if (!o.house.empty()) cfg.house = scenario::house_from_string(o.house);
  if (!o.forecast.empty()) {
    cfg.forecast = o.forecast == "persistence" ? weather::ForecastMode::Persistence
                                               : weather::ForecastMode::Perfect;
  }
  if (!o.house_pred.empty()) {
    cfg.mpc.house_pred = o.house_pred == "constant" ? mpc::HousePredMode::Constant
                                                    : mpc::HousePredMode::Offset;
  }
  if (o.horizon_steps > 0) {
    cfg.mpc.n_steps = o.horizon_steps;
    cfg.rule_based.n_steps = o.horizon_steps;
  }
  if (o.budget_hours >= 0) cfg.rule_based.fast_charge_budget_hours = o.budget_hours;
  if (o.e_bat0 > -2) cfg.e_bat0 = o.e_bat0;
  if (!std::isnan(o.t_fr0)) cfg.t_fr0 = o.t_fr0;
  if (o.storm_depth >= 0) cfg.synth.storm_depth = o.storm_depth;
  if (o.storm_start_hours >= 0) cfg.synth.storm_start_hours = o.storm_start_hours;
  if (o.storm_end_hours >= 0) cfg.synth.storm_end_hours = o.storm_end_hours;
  return cfg;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
}

int cmd_run(const CommonOpts& opts, const std::string& out_dir, bool timings,
            const std::string& dump_lp, bool print_config) {
  auto cfg = resolve_config(opts);
  cfg.dump_lp_path = dump_lp;
  if (print_config) {
    std::cout << io::scenario_to_json(cfg).dump(2) << "\n";
    return 0;
  }
  const auto res = scenario::run_scenario(cfg);
  std::cout << metrics::to_kv_text(res.report);
  if (!out_dir.empty()) {
    const auto paths = io::write_run_outputs(res, cfg, out_dir, timings);
    std::cout << "trace=" << paths.trace_csv << "\n"
              << "report=" << paths.report_json << "\n";
  }
  return 0;
}

int run_sweep(const std::vector<scenario::SweepCell>& cells, const std::string& key,
              const std::string& out_path) {
  const std::string csv_text = scenario::sweep_to_csv(cells, key);
  if (out_path.empty()) {
    std::cout << csv_text;
  } else {
    write_text(out_path, csv_text);
    std::cout << "wrote " << out_path << "\n";
  }
  int failures = 0;
  for (const auto& c : cells) failures += c.failed ? 1 : 0;
  if (failures > 0) std::cerr << failures << " sweep cell(s) failed\n";
  return 0;
}

int cmd_validate_solver(int instances, int lps, unsigned seed) {
  using namespace homeres::milp;
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> nb_dist(1, 10);
  int bad = 0;

  for (int i = 0; i < instances; ++i) {
    MilpProblem p;
    std::uniform_real_distribution<double> coef(-5.0, 5.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const int nb = nb_dist(rng);
    std::vector<double> anchor;
    for (int v = 0; v < nb; ++v) {
      p.add_variable(0.0, 1.0, coef(rng), true);
      anchor.push_back(unit(rng) < 0.5 ? 0.0 : 1.0);
    }
    std::uniform_int_distribution<int> nc_dist(0, 20);
    const int nc = nc_dist(rng);
    for (int v = 0; v < nc; ++v) {
      const double lo = -4.0 * unit(rng);
      const double hi = lo + 0.5 + 4.5 * unit(rng);
      p.add_variable(lo, hi, coef(rng));
      anchor.push_back(lo + (hi - lo) * unit(rng));
    }
    std::uniform_int_distribution<int> m_dist(1, 12);
    const int m = m_dist(rng);
    for (int r = 0; r < m; ++r) {
      std::uniform_int_distribution<int> pick(0, p.num_vars - 1);
      std::vector<std::pair<int, double>> terms;
      double act = 0.0;
      for (int t = 0; t < std::min(p.num_vars, 5); ++t) {
        const int v = pick(rng);
        const double a = coef(rng);
        terms.push_back({v, a});
        act += a * anchor[v];
      }
      const double roll = unit(rng);
      if (roll < 0.4) {
        p.add_constraint(Relation::LessEq, act + 3.0 * unit(rng), terms);
      } else if (roll < 0.8) {
        p.add_constraint(Relation::GreaterEq, act - 3.0 * unit(rng), terms);
      } else {
        p.add_constraint(Relation::Equal, act, terms);
      }
    }

    // Enumeration oracle.
    double best = std::numeric_limits<double>::infinity();
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << nb); ++mask) {
      auto lo = p.lower;
      auto hi = p.upper;
      for (int b = 0; b < nb; ++b) lo[b] = hi[b] = ((mask >> b) & 1) ? 1.0 : 0.0;
      const auto s = detail::solve_lp_bounded(p, lo, hi);
      if (s.status == SolveStatus::Optimal) best = std::min(best, s.objective_value);
    }
    const auto sol = solve_milp(p);
    const bool agree = std::isinf(best) ? sol.status == SolveStatus::Infeasible
                                        : (sol.status == SolveStatus::Optimal &&
                                           std::abs(sol.objective_value - best) <= 1e-6);
    if (!agree) {
      ++bad;
      std::cerr << "instance " << i << ": solver " << to_string(sol.status) << " "
                << sol.objective_value << " vs enumeration " << best << "\n";
    }
  }
  std::printf("[%s] branch-and-bound vs enumeration: %d/%d agree\n", bad == 0 ? "PASS" : "FAIL",
              instances - bad, instances);

  int dual_bad = 0;
  for (int i = 0; i < lps; ++i) {
    MilpProblem p;
    std::uniform_real_distribution<double> coef(-5.0, 5.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> nc_dist(1, 20);
    const int nc = nc_dist(rng);
    std::vector<double> anchor;
    for (int v = 0; v < nc; ++v) {
      const double lo = -4.0 * unit(rng);
      const double hi = lo + 0.5 + 4.5 * unit(rng);
      p.add_variable(lo, hi, coef(rng));
      anchor.push_back(lo + (hi - lo) * unit(rng));
    }
    std::uniform_int_distribution<int> m_dist(1, 10);
    const int m = m_dist(rng);
    for (int r = 0; r < m; ++r) {
      std::uniform_int_distribution<int> pick(0, p.num_vars - 1);
      std::vector<std::pair<int, double>> terms;
      double act = 0.0;
      for (int t = 0; t < std::min(p.num_vars, 5); ++t) {
        const int v = pick(rng);
        const double a = coef(rng);
        terms.push_back({v, a});
        act += a * anchor[v];
      }
      const double roll = unit(rng);
      if (roll < 0.45) {
        p.add_constraint(Relation::LessEq, act + 3.0 * unit(rng), terms);
      } else if (roll < 0.9) {
        p.add_constraint(Relation::GreaterEq, act - 3.0 * unit(rng), terms);
      } else {
        p.add_constraint(Relation::Equal, act, terms);
      }
    }
    const auto sol = solve_lp(p);
    if (sol.status != SolveStatus::Optimal) {
      ++dual_bad;
      continue;
    }
    double dual = 0.0;
    for (std::size_t r = 0; r < p.constraints.size(); ++r) {
      dual += sol.duals[r] * p.constraints[r].rhs;
    }
    for (int j = 0; j < p.num_vars; ++j) {
      if (sol.var_status[j] == 1 || sol.var_status[j] == 2) {
        dual += sol.reduced_costs[j] * sol.x[j];
      }
    }
    if (std::abs(dual - sol.objective_value) > 1e-6) ++dual_bad;
  }
  std::printf("[%s] LP strong duality: %d/%d within 1e-6\n", dual_bad == 0 ? "PASS" : "FAIL",
              lps - dual_bad, lps);
  return (bad == 0 && dual_bad == 0) ? 0 : 1;
}

int cmd_gen_profile(const CommonOpts& opts, const std::string& weather_out,
                    const std::string& secondary_out, const std::string& historical_out) {
  const auto cfg = resolve_config(opts);
  const auto sys = scenario::effective_system(cfg);
  if (!weather_out.empty()) {
    const auto recs = scenario::synthetic_weather(cfg.start, cfg.duration_days, cfg.synth);
    io::write_weather_csv(recs, weather_out);
    std::cout << "wrote " << weather_out << " (" << recs.size() << " records)\n";
  }
  if (!secondary_out.empty()) {
    const auto profile = scenario::build_secondary_profile(1, sys, cfg.dt_hours);
    std::ofstream f(secondary_out);
    f << "time_of_day,e_s_wh\n";
    for (std::size_t k = 0; k < profile.size(); ++k) {
      f << csv::fmt(static_cast<double>(k) * cfg.dt_hours) << ',' << csv::fmt(profile[k])
        << "\n";
    }
    std::cout << "wrote " << secondary_out << "\n";
  }
  if (!historical_out.empty()) {
    const auto recs = scenario::detail::load_weather(cfg, cfg.weather, cfg.duration_days);
    const auto profiles = weather::build_historical_profile(recs, cfg.dt_hours);
    io::export_historical_profiles(profiles, cfg.dt_hours, historical_out);
    std::cout << "wrote " << profiles.size() << " day files to " << historical_out << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PV+battery home energy resiliency simulator"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string out_dir, out_path, dump_lp;
  bool timings = false, print_config = false;

  auto* run = app.add_subcommand("run", "Run one closed-loop scenario");
  add_common_flags(run, opts);
  run->add_option("--out", out_dir, "Output directory (trace.csv, report.json, report.txt)");
  run->add_flag("--timings", timings, "Also write per-step solve timings");
  run->add_option("--dump-lp", dump_lp, "Dump the first horizon problem in LP-like format");
  run->add_flag("--print-config", print_config, "Print the effective config JSON and exit");

  auto* sizes = app.add_subcommand("sweep-sizes", "PRM/SRM across system sizes A-F");
  add_common_flags(sizes, opts);
  sizes->add_option("--out", out_path, "Sweep CSV path (stdout when omitted)");

  std::vector<double> horizons{1, 3, 6, 12, 24};
  auto* horizon = app.add_subcommand("sweep-horizon", "MPC/Rule-Based across horizons");
  add_common_flags(horizon, opts);
  horizon->add_option("--out", out_path, "Sweep CSV path (stdout when omitted)");
  horizon->add_option("--horizons", horizons, "Planning horizons in hours");

  std::vector<double> budgets{1, 2, 3, 4, 5, 6};
  auto* fast = app.add_subcommand("sweep-fastcharge", "Rule-Based across fast-charge budgets");
  add_common_flags(fast, opts);
  fast->add_option("--out", out_path, "Sweep CSV path (stdout when omitted)");
  fast->add_option("--budgets", budgets, "Fast-charge budgets in hours/day");

  auto* houses = app.add_subcommand("compare-house-models", "MPC under different house models");
  add_common_flags(houses, opts);
  houses->add_option("--out", out_path, "Sweep CSV path (stdout when omitted)");

  int instances = 500, lps = 200;
  unsigned seed = 20170911;
  auto* validate = app.add_subcommand("validate-solver",
                                      "Check the MILP solver against enumeration and duality");
  validate->add_option("--instances", instances, "Random MILP instances");
  validate->add_option("--lps", lps, "Random LP duality checks");
  validate->add_option("--seed", seed, "RNG seed");

  std::string weather_out, secondary_out, historical_out;
  auto* gen = app.add_subcommand("gen-profile", "Generate bundled data files");
  add_common_flags(gen, opts);
  gen->add_option("--weather-out", weather_out, "Write the synthetic weather CSV here");
  gen->add_option("--secondary-out", secondary_out, "Write the daily secondary profile here");
  gen->add_option("--historical-out", historical_out,
                  "Directory for per-day historical temperature CSVs");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(opts, out_dir, timings, dump_lp, print_config);
    if (sizes->parsed()) {
      return run_sweep(scenario::sweep_sizes(resolve_config(opts)), "size", out_path);
    }
    if (horizon->parsed()) {
      return run_sweep(scenario::sweep_horizon(resolve_config(opts), horizons), "horizon_hours",
                       out_path);
    }
    if (fast->parsed()) {
      return run_sweep(scenario::sweep_fast_charge(resolve_config(opts), budgets),
                       "budget_hours", out_path);
    }
    if (houses->parsed()) {
      return run_sweep(scenario::compare_house_models(resolve_config(opts)), "house_model",
                       out_path);
    }
    if (validate->parsed()) return cmd_validate_solver(instances, lps, seed);
    if (gen->parsed()) return cmd_gen_profile(opts, weather_out, secondary_out, historical_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
