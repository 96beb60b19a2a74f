// SPDX-License-Identifier: Apache-2.0
//
// End-to-end verification suite. Each check prints one [PASS]/[FAIL] line;
// the process exits nonzero if any check fails. Expected values come from
// independent oracles (exhaustive enumeration, fine-step integration, hand
// counting), never from the code paths under test.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <list>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "homeres/homeres.hpp"

using namespace homeres;

namespace {

int g_failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %2d: %s — %s\n", pass ? "PASS" : "FAIL", id, name.c_str(),
              detail.c_str());
  if (!pass) ++g_failures;
}

std::string fmt2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Criterion 1: branch-and-bound vs exhaustive enumeration, 500 instances.

void criterion_milp_oracle() {
  using namespace milp;
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937 rng(20170911);
  std::uniform_int_distribution<int> nb_dist(1, 10);
  std::uniform_int_distribution<int> nc_dist(0, 20);
  std::uniform_int_distribution<int> m_dist(1, 12);
  std::uniform_real_distribution<double> coef(-5.0, 5.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  int agree = 0;
  const int total = 500;
  for (int inst = 0; inst < total; ++inst) {
    MilpProblem p;
    const int nb = nb_dist(rng);
    const int nc = nc_dist(rng);
    std::vector<double> anchor;
    for (int v = 0; v < nb; ++v) {
      p.add_variable(0.0, 1.0, coef(rng), true);
      anchor.push_back(unit(rng) < 0.5 ? 0.0 : 1.0);
    }
    for (int v = 0; v < nc; ++v) {
      const double lo = -4.0 * unit(rng);
      const double hi = lo + 0.5 + 4.5 * unit(rng);
      p.add_variable(lo, hi, coef(rng));
      anchor.push_back(lo + (hi - lo) * unit(rng));
    }
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

    double oracle = std::numeric_limits<double>::infinity();
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << nb); ++mask) {
      auto lo = p.lower;
      auto hi = p.upper;
      for (int b = 0; b < nb; ++b) lo[b] = hi[b] = ((mask >> b) & 1) ? 1.0 : 0.0;
      const auto s = detail::solve_lp_bounded(p, lo, hi);
      if (s.status == SolveStatus::Optimal) oracle = std::min(oracle, s.objective_value);
    }
    const auto sol = solve_milp(p);
    const bool match = std::isinf(oracle)
                           ? sol.status == SolveStatus::Infeasible
                           : (sol.status == SolveStatus::Optimal &&
                              std::abs(sol.objective_value - oracle) <= 1e-6);
    if (match) ++agree;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report(1, "MILP oracle equivalence", agree == total && secs < 60.0,
         std::to_string(agree) + "/500 agree with enumeration in " + fmt2(secs) + " s");
}

// ---------------------------------------------------------------------------
// Criterion 2: LP strong duality from the final basis, 200 instances.

void criterion_lp_duality() {
  using namespace milp;
  std::mt19937 rng(91120);
  std::uniform_int_distribution<int> nc_dist(1, 20);
  std::uniform_int_distribution<int> m_dist(1, 10);
  std::uniform_real_distribution<double> coef(-5.0, 5.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int pass = 0;
  const int total = 200;
  for (int inst = 0; inst < total; ++inst) {
    MilpProblem p;
    const int nc = nc_dist(rng);
    std::vector<double> anchor;
    for (int v = 0; v < nc; ++v) {
      const double lo = -4.0 * unit(rng);
      const double hi = lo + 0.5 + 4.5 * unit(rng);
      p.add_variable(lo, hi, coef(rng));
      anchor.push_back(lo + (hi - lo) * unit(rng));
    }
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
    if (sol.status != SolveStatus::Optimal) continue;
    double dual = 0.0;
    for (std::size_t r = 0; r < p.constraints.size(); ++r) {
      dual += sol.duals[r] * p.constraints[r].rhs;
    }
    for (int j = 0; j < p.num_vars; ++j) {
      if (sol.var_status[j] == 1 || sol.var_status[j] == 2) {
        dual += sol.reduced_costs[j] * sol.x[j];
      }
    }
    if (std::abs(dual - sol.objective_value) <= 1e-6) ++pass;
  }
  report(2, "LP duality", pass == total,
         std::to_string(pass) + "/" + std::to_string(total) + " primal=dual within 1e-6");
}

// ---------------------------------------------------------------------------
// Shared scenario runs.

struct NamedRun {
  std::string name;
  scenario::ScenarioConfig cfg;
  scenario::RunResult result;
};

// std::list keeps references stable while later criteria add runs.
std::list<NamedRun> g_runs;

const scenario::RunResult& run_named(const std::string& name, scenario::ScenarioConfig cfg) {
  for (const auto& r : g_runs) {
    if (r.name == name) return r.result;
  }
  g_runs.push_back({name, cfg, scenario::run_scenario(cfg)});
  return g_runs.back().result;
}

scenario::ScenarioConfig default_scenario(scenario::ControllerKind ctrl) {
  scenario::ScenarioConfig cfg;
  cfg.controller = ctrl;
  return cfg;
}

void criterion_controller_ordering() {
  const auto& mpc_run = run_named("mpc-A", default_scenario(scenario::ControllerKind::Mpc));
  const auto& base_run =
      run_named("baseline-A", default_scenario(scenario::ControllerKind::Baseline));
  const auto& rb_run =
      run_named("rulebased-A", default_scenario(scenario::ControllerKind::RuleBased));

  const double prm_mpc = mpc_run.report.prm_hours_per_day;
  const double prm_rb = rb_run.report.prm_hours_per_day;
  const double prm_base = base_run.report.prm_hours_per_day;
  const bool ordering = prm_mpc >= prm_rb && prm_rb > prm_base;
  const bool thresholds = prm_mpc >= 20.0 && prm_base < 20.0;
  report(4, "PRM controller ordering",
         ordering && thresholds,
         "PRM mpc=" + fmt2(prm_mpc) + " rulebased=" + fmt2(prm_rb) +
             " baseline=" + fmt2(prm_base) + " (need mpc>=rb>base, mpc>=20, base<20)");

  const double srm_mpc = mpc_run.report.srm_pct;
  const double srm_rb = rb_run.report.srm_pct;
  const double srm_base = base_run.report.srm_pct;
  report(5, "SRM controller ordering", srm_mpc > srm_base && srm_mpc >= srm_rb,
         "SRM mpc=" + fmt2(srm_mpc) + " rulebased=" + fmt2(srm_rb) +
             " baseline=" + fmt2(srm_base) + " (need mpc>base, mpc>=rb)");
}

void criterion_mpc_solver_performance() {
  const auto& mpc_run = run_named("mpc-A", default_scenario(scenario::ControllerKind::Mpc));
  double total = 0.0;
  for (double t : mpc_run.solve_times) total += t;
  const double avg = mpc_run.solve_times.empty()
                         ? 0.0
                         : total / static_cast<double>(mpc_run.solve_times.size());
  const double success = mpc_run.report.solver_success_pct;
  report(3, "MPC solve performance at the 3 h horizon", avg < 1.0 && success == 100.0,
         "avg " + fmt2(avg * 1000.0) + " ms over " +
             std::to_string(mpc_run.solve_times.size()) + " solves, success " + fmt2(success) +
             "%");
}

void criterion_size_sweep() {
  const std::string labels = "ABCDEF";
  std::map<char, std::map<scenario::ControllerKind, metrics::ResiliencyReport>> grid;
  for (char label : labels) {
    for (auto ctrl : {scenario::ControllerKind::Mpc, scenario::ControllerKind::Baseline,
                      scenario::ControllerKind::RuleBased}) {
      auto cfg = default_scenario(ctrl);
      cfg.size_preset = std::string(1, label);
      const std::string name = std::string(scenario::to_string(ctrl)) + "-" + label;
      grid[label][ctrl] = run_named(name, cfg).report;
    }
  }

  bool monotone = true;
  std::string detail;
  for (auto ctrl : {scenario::ControllerKind::Mpc, scenario::ControllerKind::Baseline,
                    scenario::ControllerKind::RuleBased}) {
    double prev = -1.0;
    for (char label : labels) {
      const double srm = grid[label][ctrl].srm_pct;
      if (srm < prev - 1e-9) {
        monotone = false;
        detail += std::string(scenario::to_string(ctrl)) + " SRM drops at " + label + "; ";
      }
      prev = srm;
    }
  }

  const double prm_mpc_a = grid['A'][scenario::ControllerKind::Mpc].prm_hours_per_day;
  int crossover = -1;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (grid[labels[i]][scenario::ControllerKind::Baseline].prm_hours_per_day >= prm_mpc_a) {
      crossover = static_cast<int>(i);
      break;
    }
  }
  const bool crossover_ok = crossover >= 2;
  std::string cross_text = crossover < 0 ? "none within A..F"
                                         : std::string(1, labels[crossover]);
  report(6, "size-sweep trends", monotone && crossover_ok,
         "SRM monotone=" + std::string(monotone ? "yes" : "no") +
             (detail.empty() ? "" : " (" + detail + ")") + ", baseline reaches MPC@A PRM (" +
             fmt2(prm_mpc_a) + ") first at size " + cross_text);
}

void criterion_plant_invariants() {
  bool all_ok = true;
  bool on = false, off = false, latch = false;
  long steps = 0;
  std::string first;
  for (const auto& r : g_runs) {
    const auto sys = scenario::effective_system(r.cfg);
    const auto audit = metrics::audit_trace(r.result.trace, sys);
    steps += static_cast<long>(r.result.trace.rows.size());
    on |= audit.saw_thermostat_on;
    off |= audit.saw_thermostat_off;
    latch |= audit.saw_thermostat_latch;
    if (!audit.ok && first.empty()) first = r.name + ": " + audit.first_failure;
    all_ok &= audit.ok;
  }
  report(7, "plant invariants over every acceptance run", all_ok && on && off && latch,
         std::to_string(steps) + " steps audited" + (first.empty() ? "" : "; " + first) +
             (on && off && latch ? "; all hysteresis branches exercised"
                                 : "; missing hysteresis branch"));
}

// ---------------------------------------------------------------------------
// Criterion 8: exact discretization vs Δt/1000 forward Euler, 24 h free
// response. Euler's own first-order bias bounds what the comparison can
// resolve; the per-step check (same-state restart each step) isolates the
// coefficients at the stated 1e-6 tolerance, and the accumulated trajectories
// are held to the attainable 1e-5.

void criterion_fridge_zoh_oracle() {
  plant::SystemConfig sys;
  const double dt = 1.0 / 6.0;
  const auto disc = plant::discretize_fridge(sys, dt);
  const double t_house = 25.0;
  const double tau = sys.r_fr * sys.c_fr;
  const int substeps = 1000;
  const double h = dt * 3600.0 / substeps;

  auto euler_from = [&](double t) {
    for (int i = 0; i < substeps; ++i) t += h * (t_house - t) / tau;
    return t;
  };

  double t_zoh = t_house + 1.0;
  double t_euler = t_zoh;
  double max_step_diff = 0.0;
  double max_traj_diff = 0.0;
  for (int k = 0; k < 144; ++k) {
    const double zoh_next = disc.a * t_zoh + disc.d * t_house;
    const double euler_same_state = euler_from(t_zoh);
    max_step_diff = std::max(max_step_diff, std::abs(zoh_next - euler_same_state));
    t_zoh = zoh_next;
    t_euler = euler_from(t_euler);
    max_traj_diff = std::max(max_traj_diff, std::abs(t_zoh - t_euler));
  }
  report(8, "fridge ZOH vs fine-step Euler", max_step_diff < 1e-6 && max_traj_diff < 1e-5,
         "per-step max " + std::to_string(max_step_diff) + " degC, 24 h drift " +
             std::to_string(max_traj_diff) + " degC");
}

// ---------------------------------------------------------------------------
// Criterion 9: metric formulas on hand-constructed traces.

void criterion_metric_formulas() {
  plant::SystemConfig sys;
  auto make_row = [](double t_fr, double desired, double served) {
    TraceRow r;
    r.t_fr_after = t_fr;
    r.acct.e_s_desired = desired;
    r.acct.e_s_served = served;
    return r;
  };
  RunTrace violation;
  violation.dt_hours = 1.0 / 6.0;
  for (int i = 0; i < 10; ++i) violation.rows.push_back(make_row(7.0, 0, 0));
  RunTrace clean;
  clean.dt_hours = 1.0 / 6.0;
  for (int i = 0; i < 10; ++i) clean.rows.push_back(make_row(3.0, 0, 0));
  RunTrace half;
  half.dt_hours = 1.0 / 6.0;
  for (int i = 0; i < 10; ++i) {
    const bool demand = i >= 6;
    half.rows.push_back(make_row(3.0, demand ? 43.3 : 0.0, (demand && i % 2 == 0) ? 43.3 : 0.0));
  }
  const double prm_violation = metrics::compute_prm(violation, sys);
  const double prm_clean = metrics::compute_prm(clean, sys);
  const double srm_half = metrics::compute_srm(half);
  report(9, "metric formulas on hand traces",
         prm_violation == 0.0 && prm_clean == 24.0 && srm_half == 50.0,
         "PRM full-violation=" + fmt2(prm_violation) + " no-violation=" + fmt2(prm_clean) +
             " SRM half-served=" + fmt2(srm_half));
}

void criterion_house_model_insensitivity() {
  auto trace_cfg = default_scenario(scenario::ControllerKind::Mpc);
  trace_cfg.house = scenario::HouseKind::TraceDriven;
  auto rc_cfg = default_scenario(scenario::ControllerKind::Mpc);
  rc_cfg.house = scenario::HouseKind::FirstOrderRC;
  const auto& run_trace = run_named("mpc-A-house-trace", trace_cfg);
  const auto& run_rc = run_named("mpc-A", rc_cfg);  // default house is RC
  const double diff = std::abs(run_trace.report.prm_hours_per_day -
                               run_rc.report.prm_hours_per_day);
  report(10, "house-model insensitivity", diff <= 1.0,
         "PRM trace=" + fmt2(run_trace.report.prm_hours_per_day) + " rc=" +
             fmt2(run_rc.report.prm_hours_per_day) + " diff=" + fmt2(diff) + " h/day (<=1)");
}

void criterion_fast_charge_budget() {
  bool budget_ok = true;
  double prm_min = 1e9, prm_max = -1e9;
  std::string detail;
  for (double budget : {1.0, 2.0, 3.0, 4.0, 5.0, 6.0}) {
    auto cfg = default_scenario(scenario::ControllerKind::RuleBased);
    cfg.rule_based.fast_charge_budget_hours = budget;
    const auto& run = run_named("rulebased-A-budget-" + fmt2(budget), cfg);
    std::map<std::int64_t, double> per_day;
    for (const auto& r : run.trace.rows) {
      if (r.cmd.x_bat == 2) per_day[r.timestamp.day_index()] += run.trace.dt_hours;
    }
    double worst = 0.0;
    for (const auto& [_, h] : per_day) worst = std::max(worst, h);
    if (worst > budget + 1e-9) {
      budget_ok = false;
      detail += "budget " + fmt2(budget) + " used " + fmt2(worst) + "; ";
    }
    prm_min = std::min(prm_min, run.report.prm_hours_per_day);
    prm_max = std::max(prm_max, run.report.prm_hours_per_day);
  }
  const double spread = prm_max - prm_min;
  report(11, "fast-charge budget audit", budget_ok && spread <= 2.0,
         std::string("daily usage within budget: ") + (budget_ok ? "yes" : "no ") + detail +
             ", PRM spread " + fmt2(spread) + " h/day (<=2)");
}

void criterion_determinism() {
  const auto cfg = default_scenario(scenario::ControllerKind::Mpc);
  const auto& first = run_named("mpc-A", cfg);
  const auto again = scenario::run_scenario(cfg);
  const std::string a = trace_to_csv(first.trace);
  const std::string b = trace_to_csv(again.trace);
  report(12, "byte-identical reruns", a == b,
         a == b ? std::to_string(a.size()) + " bytes identical" : "trace bytes differ");
}

}  // namespace

int main() {
  std::printf("acceptance suite: embedded-solver MPC home resiliency simulator\n");
  criterion_milp_oracle();
  criterion_lp_duality();
  criterion_controller_ordering();   // also primes runs for 3/7/12
  criterion_mpc_solver_performance();
  criterion_size_sweep();
  criterion_house_model_insensitivity();
  criterion_fast_charge_budget();
  criterion_fridge_zoh_oracle();
  criterion_metric_formulas();
  criterion_determinism();
  criterion_plant_invariants();  // audits every run recorded above
  if (g_failures == 0) {
    std::printf("all criteria passed\n");
    return 0;
  }
  std::printf("%d criterion(s) failed\n", g_failures);
  return 1;
}
