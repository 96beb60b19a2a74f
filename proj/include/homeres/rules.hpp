// SPDX-License-Identifier: Apache-2.0
#pragma once

// The two comparison controllers: the commercial-style Baseline (supply the
// loads while there is supply, normal charging only) and the Rule-Based
// controller (thermostat fridge command, N-step internal plant simulation,
// mismatch-driven secondary logic, fast charging under a daily hour budget).

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "homeres/datetime.hpp"
#include "homeres/plant.hpp"

namespace homeres::rules {

namespace detail {
constexpr double kSupplySlack = 1e-9;
}

// Supply check and charge-controller rules of the baseline system. The
// refrigerator draw used for the decision honors the thermostat latch (the
// charge controller reacts to actual power flow, not to a fridge sensor).
class BaselineController {
 public:
  BaselineController(plant::SystemConfig sys, double dt_hours)
      : sys_(sys), dt_hours_(dt_hours) {}

  plant::ControlCommand decide(const plant::PlantState& state, double e_pv,
                               double e_s_desired) const {
    const double deliverable =
        std::min((state.e_bat - sys_.e_bat_min) * sys_.eta_dc, sys_.e_bat_dc_max);
    const double supply = e_pv + std::max(deliverable, 0.0);
    const double e_fr = plant::thermostat(state, sys_) ? sys_.p_fr_rated * dt_hours_ : 0.0;

    plant::ControlCommand cmd;
    if (supply + detail::kSupplySlack >= (e_fr + e_s_desired) / sys_.eta_inv) {
      cmd.u_fr = true;
      cmd.u_s = e_s_desired > 0.0;
    } else if (supply + detail::kSupplySlack >= e_fr / sys_.eta_inv) {
      cmd.u_fr = true;
    }
    const double served =
        ((cmd.u_fr ? e_fr : 0.0) + (cmd.u_s ? e_s_desired : 0.0)) / sys_.eta_inv;
    cmd.c = e_pv > served + detail::kSupplySlack;
    cmd.d = e_pv + detail::kSupplySlack < served;
    cmd.x_bat = cmd.c ? 1 : 0;
    return cmd;
  }

  // Baseline augmented with fast charging, used by the Rule-Based internal
  // simulation and its battery logic. Decrements `budget_hours` in place.
  plant::ControlCommand decide_with_fast_charge(const plant::PlantState& state, double e_pv,
                                                double e_s_desired,
                                                double& budget_hours) const {
    plant::ControlCommand cmd = decide(state, e_pv, e_s_desired);
    if (cmd.c) {
      const double e_fr = plant::thermostat(state, sys_) ? sys_.p_fr_rated * dt_hours_ : 0.0;
      const double e_hl =
          ((cmd.u_fr ? e_fr : 0.0) + (cmd.u_s ? e_s_desired : 0.0)) / sys_.eta_inv;
      if (e_pv - e_hl > sys_.e_bat_c_max && budget_hours >= dt_hours_ - 1e-12) {
        cmd.x_bat = 2;
        budget_hours -= dt_hours_;
      }
    }
    return cmd;
  }

 private:
  plant::SystemConfig sys_;
  double dt_hours_;
};

struct RuleBasedConfig {
  int n_steps = 18;
  double fast_charge_budget_hours = 5.0;
  double dt_hours = 1.0 / 6.0;

  void validate() const {
    if (n_steps < 1) throw std::invalid_argument("rules: n_steps must be >= 1");
    if (fast_charge_budget_hours < 0) throw std::invalid_argument("rules: negative budget");
    if (dt_hours <= 0) throw std::invalid_argument("rules: dt_hours must be positive");
  }
};

struct MismatchReport {
  double e_serviced = 0.0;  // Wh over the internal horizon
  double e_desired = 0.0;
  double e_mis = 0.0;  // serviced - desired, always <= 0
};

struct HorizonOutOfRange : std::runtime_error {
  HorizonOutOfRange() : std::runtime_error("rules: forecasts shorter than internal horizon") {}
};

// Mismatch-driven secondary gate. u_s stays binary: the current step is
// served only when the projected shortfall fits in the rest of the horizon's
// secondary energy, so the mismatch is shed through the secondary load alone,
// one step at a time.
inline bool secondary_logic(const MismatchReport& report, double e_s_now,
                            double e_s_horizon_total) {
  if (e_s_now <= 0.0) return false;
  return -report.e_mis <= e_s_horizon_total - e_s_now + 1e-9;
}

class RuleBasedController {
 public:
  RuleBasedController(RuleBasedConfig cfg, plant::SystemConfig sys)
      : cfg_(cfg),
        sys_(sys),
        disc_(plant::discretize_fridge(sys, cfg.dt_hours)),
        baseline_(sys, cfg.dt_hours) {
    cfg_.validate();
    sys_.validate();
  }

  double budget_remaining() const { return budget_left_; }

  // Closed-loop simulation of the plant over the internal horizon under the
  // baseline-with-fast-charging policy, accumulating serviced vs. desired
  // load energy. Forecast spans must cover n_steps.
  MismatchReport internal_simulation(const plant::PlantState& state, DateTime now,
                                     std::span<const double> e_pv_fc,
                                     std::span<const double> e_s_fc,
                                     std::span<const double> house_fc) const {
    const int n = cfg_.n_steps;
    if (static_cast<int>(e_pv_fc.size()) < n || static_cast<int>(e_s_fc.size()) < n ||
        static_cast<int>(house_fc.size()) < n) {
      throw HorizonOutOfRange{};
    }
    const plant::HouseModel house = plant::HouseTraceDriven{};
    plant::PlantState sim = state;
    sim.house_state.clear();
    double budget = budget_left_;
    std::int64_t day = now.day_index();
    MismatchReport rep;
    const double e_fr_full = sys_.p_fr_rated * cfg_.dt_hours;
    for (int i = 0; i < n; ++i) {
      const DateTime t = now.plus_hours(cfg_.dt_hours * i);
      if (t.day_index() != day) {
        day = t.day_index();
        budget = cfg_.fast_charge_budget_hours;
      }
      const bool desire = plant::thermostat(sim, sys_);
      rep.e_desired += (desire ? e_fr_full : 0.0) + e_s_fc[i];
      const plant::ControlCommand cmd =
          baseline_.decide_with_fast_charge(sim, e_pv_fc[i], e_s_fc[i], budget);
      // The internal plant sees the predicted house temperature; the spans
      // hold PV energy per step, so GHI is backed out for the step call.
      const double ghi = e_pv_fc[i] * sys_.g_std /
                         (sys_.n_pv * sys_.p_pv_rated * cfg_.dt_hours);
      auto [next, acct] =
          plant::step(sim, cmd, ghi, e_s_fc[i], house_fc[i], sys_, disc_, house, cfg_.dt_hours);
      rep.e_serviced += acct.e_fr + acct.e_s_served;
      sim = next;
    }
    rep.e_mis = rep.e_serviced - rep.e_desired;
    return rep;
  }

  std::pair<plant::ControlCommand, MismatchReport> decide(const plant::PlantState& state,
                                                          DateTime now, double e_pv_now,
                                                          double e_s_now,
                                                          std::span<const double> e_pv_fc,
                                                          std::span<const double> e_s_fc,
                                                          std::span<const double> house_fc) {
    if (now.day_index() != current_day_) {
      current_day_ = now.day_index();
      budget_left_ = cfg_.fast_charge_budget_hours;
    }
    const bool u_fr = plant::thermostat(state, sys_);
    const MismatchReport rep = internal_simulation(state, now, e_pv_fc, e_s_fc, house_fc);
    const double e_s_total =
        std::accumulate(e_s_fc.begin(), e_s_fc.begin() + cfg_.n_steps, 0.0);
    const bool u_s = secondary_logic(rep, e_s_now, e_s_total);

    plant::ControlCommand cmd;
    cmd.u_fr = u_fr;
    cmd.u_s = u_s;
    const double e_fr = u_fr ? sys_.p_fr_rated * cfg_.dt_hours : 0.0;
    const double e_hl = (e_fr + (u_s ? e_s_now : 0.0)) / sys_.eta_inv;
    cmd.c = e_pv_now > e_hl + detail::kSupplySlack;
    cmd.d = e_pv_now + detail::kSupplySlack < e_hl;
    if (cmd.c) {
      if (e_pv_now - e_hl > sys_.e_bat_c_max && budget_left_ >= cfg_.dt_hours - 1e-12) {
        cmd.x_bat = 2;
        budget_left_ -= cfg_.dt_hours;
      } else {
        cmd.x_bat = 1;
      }
    }
    return {cmd, rep};
  }

 private:
  RuleBasedConfig cfg_;
  plant::SystemConfig sys_;
  plant::FridgeDiscretization disc_;
  BaselineController baseline_;
  double budget_left_ = 0.0;
  std::int64_t current_day_ = std::numeric_limits<std::int64_t>::min();
};

}  // namespace homeres::rules
