// SPDX-License-Identifier: Apache-2.0
#pragma once

// Receding-horizon controller: builds a MILP over the planning horizon each
// step, solves it with the embedded solver, and maps the first-step solution
// to plant commands. Includes the measured-anchor parametric house
// temperature predictor.

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "homeres/milp.hpp"
#include "homeres/plant.hpp"

namespace homeres::mpc {

enum class HousePredMode {
  Offset,    // historical shape re-anchored to the measured temperature
  Constant,  // measured temperature held over the horizon
};

struct MpcConfig {
  int n_steps = 18;
  double dt_hours = 1.0 / 6.0;
  double lambda1 = 1.0;   // per degC of fridge band violation
  double lambda2 = 1.0;   // per kWh of battery energy
  double lambda3 = 1.0;   // per unit of the charge fraction
  double lambda4 = 10.0;  // per served secondary step
  double gamma_min = -1.0;
  double gamma_max = 2.0;
  double eta_con = 1.0;  // controller-side battery efficiency
  HousePredMode house_pred = HousePredMode::Offset;
  milp::SolveLimits limits;

  void validate() const {
    if (n_steps < 1) throw std::invalid_argument("mpc: n_steps must be >= 1");
    if (!(gamma_min < 0.0 && 0.0 < 1.0 && 1.0 < gamma_max)) {
      throw std::invalid_argument("mpc: need gamma_min < 0 < 1 < gamma_max");
    }
    if (lambda1 < 0 || lambda2 < 0 || lambda3 < 0 || lambda4 < 0) {
      throw std::invalid_argument("mpc: weights must be nonnegative");
    }
    if (dt_hours <= 0) throw std::invalid_argument("mpc: dt_hours must be positive");
  }
};

// Column map for the horizon decision vector. States carry N+1 entries
// (index 0 pinned to measurements by equality rows); controls and internal
// variables carry N.
struct MpcDecisionLayout {
  int n = 0;

  int t_fr(int i) const { return i; }
  int e_bat(int i) const { return (n + 1) + i; }
  int gamma(int i) const { return 2 * (n + 1) + i; }
  int u_fr(int i) const { return 2 * (n + 1) + n + i; }
  int u_s(int i) const { return 2 * (n + 1) + 2 * n + i; }
  int g(int i) const { return 2 * (n + 1) + 3 * n + i; }
  int zeta(int i) const { return 2 * (n + 1) + 4 * n + i; }
  int num_vars() const { return 7 * n + 2; }
};

struct HousePrediction {
  std::vector<double> values;  // degC per horizon step
};

struct SliceTooShort : std::runtime_error {
  SliceTooShort() : std::runtime_error("mpc: historical slice shorter than horizon") {}
};

// values(0) = measured; later steps follow the historical profile shifted by
// the measured-vs-historical offset at the anchor (Offset mode) or hold the
// measurement (Constant mode).
inline HousePrediction predict_house_temp(double t_meas, std::span<const double> t_hist, int n,
                                          HousePredMode mode = HousePredMode::Offset) {
  if (static_cast<int>(t_hist.size()) < n) throw SliceTooShort{};
  HousePrediction pred;
  pred.values.resize(n);
  pred.values[0] = t_meas;
  for (int i = 1; i < n; ++i) {
    pred.values[i] =
        mode == HousePredMode::Offset ? t_hist[i] + (t_meas - t_hist[0]) : t_meas;
  }
  return pred;
}

// Encodes the horizon optimization. Time-varying weights run N..1 over the
// horizon so earlier violations and earlier secondary service matter more.
inline milp::MilpProblem build_problem(double e_bat_meas, double t_fr_meas,
                                       std::span<const double> e_pv,
                                       std::span<const double> e_s,
                                       const HousePrediction& house_pred, const MpcConfig& cfg,
                                       const plant::SystemConfig& sys,
                                       const plant::FridgeDiscretization& disc) {
  cfg.validate();
  const int n = cfg.n_steps;
  if (static_cast<int>(e_pv.size()) != n || static_cast<int>(e_s.size()) != n ||
      static_cast<int>(house_pred.values.size()) != n) {
    throw std::invalid_argument("mpc: forecast lengths must equal the horizon");
  }
  const MpcDecisionLayout lay{n};
  milp::MilpProblem p;
  p.num_vars = lay.num_vars();
  p.objective.assign(p.num_vars, 0.0);
  p.lower.assign(p.num_vars, 0.0);
  p.upper.assign(p.num_vars, 0.0);
  p.binary.assign(p.num_vars, 0);

  const double e_fr = sys.p_fr_rated * cfg.dt_hours;
  auto set_bounds = [&](int j, double lo, double hi) {
    p.lower[j] = lo;
    p.upper[j] = hi;
  };

  set_bounds(lay.t_fr(0), -milp::kInf, milp::kInf);
  set_bounds(lay.e_bat(0), -milp::kInf, milp::kInf);
  for (int i = 1; i <= n; ++i) {
    set_bounds(lay.t_fr(i), sys.t_fr_min, milp::kInf);
    set_bounds(lay.e_bat(i), sys.e_bat_min, sys.e_bat_max);
  }
  for (int i = 0; i < n; ++i) {
    const double w = static_cast<double>(n - i);
    set_bounds(lay.gamma(i), cfg.gamma_min, cfg.gamma_max);
    set_bounds(lay.u_fr(i), 0.0, 1.0);
    p.binary[lay.u_fr(i)] = 1;
    set_bounds(lay.u_s(i), 0.0, e_s[i] > 0.0 ? 1.0 : 0.0);
    p.binary[lay.u_s(i)] = 1;
    set_bounds(lay.g(i), 0.0, std::max(e_pv[i], 0.0));
    set_bounds(lay.zeta(i), 0.0, milp::kInf);

    p.objective[lay.zeta(i)] = cfg.lambda1 * w;
    p.objective[lay.e_bat(i)] += -cfg.lambda2 / 1000.0;  // battery term is per kWh
    p.objective[lay.gamma(i)] = cfg.lambda3;
    p.objective[lay.u_s(i)] = -cfg.lambda4 * w;
  }

  // Measured initial state.
  p.add_constraint(milp::Relation::Equal, t_fr_meas, {{lay.t_fr(0), 1.0}});
  p.add_constraint(milp::Relation::Equal, e_bat_meas, {{lay.e_bat(0), 1.0}});

  for (int i = 0; i < n; ++i) {
    // Fridge thermal dynamics.
    p.add_constraint(milp::Relation::Equal, disc.d * house_pred.values[i],
                     {{lay.t_fr(i + 1), 1.0},
                      {lay.t_fr(i), -disc.a},
                      {lay.u_fr(i), -disc.b * disc.q_fr}});
    // Battery dynamics with the single continuous charge fraction.
    p.add_constraint(milp::Relation::Equal, 0.0,
                     {{lay.e_bat(i + 1), 1.0},
                      {lay.e_bat(i), -1.0},
                      {lay.gamma(i), -cfg.eta_con * sys.e_bat_c_max}});
    // Energy balance against the PV energy actually used.
    p.add_constraint(milp::Relation::Equal, 0.0,
                     {{lay.u_fr(i), e_fr},
                      {lay.gamma(i), sys.e_bat_c_max},
                      {lay.u_s(i), e_s[i]},
                      {lay.g(i), -1.0}});
    // Upper fridge band, relaxed by the slack; lower band is a variable bound.
    p.add_constraint(milp::Relation::LessEq, sys.t_fr_max,
                     {{lay.t_fr(i + 1), 1.0}, {lay.zeta(i), -1.0}});
  }
  return p;
}

struct GammaDecision {
  bool c = false;
  bool d = false;
  int x_bat = 0;
};

inline GammaDecision map_gamma(double gamma) {
  GammaDecision out;
  out.c = gamma > 0.0;
  out.d = gamma < 0.0;
  if (gamma > 0.0 && gamma <= 1.0) {
    out.x_bat = 1;
  } else if (gamma > 1.0 && gamma <= 2.0) {
    out.x_bat = 2;
  } else {
    out.x_bat = 0;
  }
  return out;
}

struct MpcDiagnostics {
  milp::SolveStatus status = milp::SolveStatus::Stalled;
  long nodes = 0;
  double solve_time_seconds = 0.0;
  double objective = 0.0;
  double gamma = 0.0;
  bool fallback = false;  // safe command substituted
};

class MpcController {
 public:
  MpcController(MpcConfig cfg, plant::SystemConfig sys)
      : cfg_(cfg), sys_(sys), disc_(plant::discretize_fridge(sys, cfg.dt_hours)) {
    cfg_.validate();
    sys_.validate();
  }

  const MpcConfig& config() const { return cfg_; }

  // Builds and solves the horizon problem, warm-hinted with the previous
  // solution shifted one step. Solver failures degrade to the all-off safe
  // command rather than aborting the run.
  std::pair<plant::ControlCommand, MpcDiagnostics> control_step(
      double e_bat, double t_fr, double t_house_meas, std::span<const double> e_pv_forecast,
      std::span<const double> e_s_forecast, std::span<const double> t_hist_slice) {
    const int n = cfg_.n_steps;
    const HousePrediction pred =
        predict_house_temp(t_house_meas, t_hist_slice, n, cfg_.house_pred);
    last_problem_ = build_problem(e_bat, t_fr, e_pv_forecast, e_s_forecast, pred, cfg_, sys_,
                                  disc_);

    std::vector<double> hint;
    const MpcDecisionLayout lay{n};
    if (!last_x_.empty()) {
      hint.resize(lay.num_vars());
      auto shift_state = [&](auto col) {
        for (int i = 0; i <= n; ++i) hint[col(i)] = last_x_[col(std::min(i + 1, n))];
      };
      auto shift_ctrl = [&](auto col) {
        for (int i = 0; i < n; ++i) hint[col(i)] = last_x_[col(std::min(i + 1, n - 1))];
      };
      shift_state([&](int i) { return lay.t_fr(i); });
      shift_state([&](int i) { return lay.e_bat(i); });
      shift_ctrl([&](int i) { return lay.gamma(i); });
      shift_ctrl([&](int i) { return lay.u_fr(i); });
      shift_ctrl([&](int i) { return lay.u_s(i); });
      shift_ctrl([&](int i) { return lay.g(i); });
      shift_ctrl([&](int i) { return lay.zeta(i); });
    }

    const milp::MilpSolution sol =
        milp::solve_milp(last_problem_, cfg_.limits, hint.empty() ? nullptr : &hint);

    MpcDiagnostics diag;
    diag.status = sol.status;
    diag.nodes = sol.nodes_explored;
    diag.solve_time_seconds = sol.solve_time_seconds;

    plant::ControlCommand cmd;  // all-off safe command by default
    if (!sol.x.empty()) {
      diag.objective = sol.objective_value;
      // Guard against solver-tolerance spill past the box before mapping.
      diag.gamma = std::clamp(sol.x[lay.gamma(0)], cfg_.gamma_min, cfg_.gamma_max);
      const GammaDecision gd = map_gamma(diag.gamma);
      cmd.u_fr = sol.x[lay.u_fr(0)] > 0.5;
      cmd.u_s = sol.x[lay.u_s(0)] > 0.5;
      cmd.c = gd.c;
      cmd.d = gd.d;
      cmd.x_bat = gd.x_bat;
      last_x_ = sol.x;
    } else {
      diag.fallback = true;
      last_x_.clear();
    }
    return {cmd, diag};
  }

  // Problem from the most recent control step, for flag-gated dumps.
  const milp::MilpProblem& last_problem() const { return last_problem_; }

 private:
  MpcConfig cfg_;
  plant::SystemConfig sys_;
  plant::FridgeDiscretization disc_;
  milp::MilpProblem last_problem_;
  std::vector<double> last_x_;
};

}  // namespace homeres::mpc
