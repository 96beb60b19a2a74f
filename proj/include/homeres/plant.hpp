// SPDX-License-Identifier: Apache-2.0
#pragma once

// Physical truth the controllers act on: PV production, battery bucket,
// thermostat-latched refrigerator thermal dynamics, pluggable house model,
// and the supply/demand interconnect with priority shedding.
//
// Units are fixed repo-wide: energy Wh, power W, time hours (seconds only
// inside discretization), temperature degC.

#include <cmath>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

namespace homeres::plant {

struct SystemConfig {
  // PV
  int n_pv = 3;
  double p_pv_rated = 285.0;  // W per panel
  double g_std = 1000.0;      // W/m2 standard test irradiance
  // Battery
  double e_bat_min = 1080.0;    // Wh floor
  double e_bat_max = 5400.0;    // Wh ceiling
  double e_bat_c_max = 810.0;   // Wh per step, normal charging mode
  double e_bat_dc_max = 844.5;  // Wh per step, discharge delivered to bus
  double eta_c = 0.9;
  double eta_dc = 0.9;
  double fast_charge_multiplier = 2.0;
  // Inverter
  double eta_inv = 0.9;
  // Refrigerator
  double p_fr_rated = 250.0;  // W
  double t_fr_min = 0.0;      // degC
  double t_fr_max = 4.0;      // degC
  double r_fr = 1.4749;       // degC/W
  double c_fr = 8937.4;       // J/degC
  double cop = 0.2324;
  // Secondary loads
  int n_lights = 6;
  double p_light = 8.0;  // W each
  int n_fans = 4;
  double p_fan = 65.0;  // W each

  void validate() const {
    auto in01 = [](double v) { return v > 0.0 && v <= 1.0; };
    if (!in01(eta_c) || !in01(eta_dc) || !in01(eta_inv)) {
      throw std::invalid_argument("plant: efficiencies must be in (0,1]");
    }
    if (!(e_bat_min < e_bat_max)) throw std::invalid_argument("plant: e_bat_min >= e_bat_max");
    if (!(t_fr_min < t_fr_max)) throw std::invalid_argument("plant: t_fr_min >= t_fr_max");
    if (n_pv <= 0 || p_pv_rated <= 0 || g_std <= 0 || p_fr_rated <= 0 || r_fr <= 0 ||
        c_fr <= 0 || cop <= 0 || e_bat_c_max <= 0 || e_bat_dc_max <= 0) {
      throw std::invalid_argument("plant: ratings must be positive");
    }
  }

  double secondary_lights_w() const { return n_lights * p_light; }
  double secondary_fans_w() const { return n_fans * p_fan; }
};

// T_fr(k+1) = a*T_fr(k) + b*u*q_fr + d*T_house(k), exact zero-order hold of
// dT/dt = (T_house - T)/(R C) - u*Q/C over one step.
struct FridgeDiscretization {
  double a = 0.0;
  double b = 0.0;
  double d = 0.0;
  double q_fr = 0.0;  // W thermal, COP * rated electrical power
};

inline FridgeDiscretization discretize_fridge(const SystemConfig& cfg, double dt_hours) {
  if (dt_hours <= 0) throw std::invalid_argument("plant: dt_hours must be positive");
  FridgeDiscretization disc;
  const double tau_seconds = cfg.r_fr * cfg.c_fr;
  disc.a = std::exp(-dt_hours * 3600.0 / tau_seconds);
  disc.d = 1.0 - disc.a;
  disc.b = -(1.0 - disc.a) * cfg.r_fr;
  disc.q_fr = cfg.cop * cfg.p_fr_rated;
  return disc;
}

inline double pv_energy(const SystemConfig& cfg, double ghi, double dt_hours) {
  return cfg.n_pv * cfg.p_pv_rated * (ghi / cfg.g_std) * dt_hours;
}

// House temperature models. Each maps the ambient input stream to the indoor
// temperature the refrigerator sees. Matrices of the state-space variant are
// discrete-time at the simulation step.
struct HouseTraceDriven {};

struct HouseFirstOrderRC {
  double r_h = 0.02;     // degC/W
  double c_h = 7.2e5;    // J/degC
};

struct HouseLinearStateSpace {
  int n = 0;
  std::vector<double> a;  // n*n row-major
  std::vector<double> b;  // n
  std::vector<double> c;  // n
  double d = 0.0;
};

using HouseModel = std::variant<HouseTraceDriven, HouseFirstOrderRC, HouseLinearStateSpace>;

struct PlantState {
  double e_bat = 0.0;
  double t_fr = 0.0;
  bool compressor_on = false;  // thermostat latch (desired compressor state)
  std::vector<double> house_state;
  long step = 0;
};

inline PlantState initial_state(const SystemConfig& cfg, const HouseModel& house, double e_bat0,
                                double t_fr0, double t_house0) {
  if (e_bat0 < cfg.e_bat_min || e_bat0 > cfg.e_bat_max) {
    throw std::invalid_argument("plant: initial battery energy outside bounds");
  }
  if (!std::isfinite(t_fr0)) throw std::invalid_argument("plant: initial T_fr not finite");
  PlantState s;
  s.e_bat = e_bat0;
  s.t_fr = t_fr0;
  if (std::holds_alternative<HouseFirstOrderRC>(house)) {
    s.house_state = {t_house0};
  } else if (const auto* lss = std::get_if<HouseLinearStateSpace>(&house)) {
    s.house_state.assign(lss->n, t_house0);
  }
  return s;
}

inline double house_output(const HouseModel& house, const PlantState& s, double ambient) {
  if (std::holds_alternative<HouseTraceDriven>(house)) return ambient;
  if (std::holds_alternative<HouseFirstOrderRC>(house)) return s.house_state[0];
  const auto& lss = std::get<HouseLinearStateSpace>(house);
  double t = lss.d * ambient;
  for (int i = 0; i < lss.n; ++i) t += lss.c[i] * s.house_state[i];
  return t;
}

inline void house_advance(const HouseModel& house, PlantState& s, double ambient,
                          double dt_hours) {
  if (const auto* rc = std::get_if<HouseFirstOrderRC>(&house)) {
    const double a = std::exp(-dt_hours * 3600.0 / (rc->r_h * rc->c_h));
    s.house_state[0] = a * s.house_state[0] + (1.0 - a) * ambient;
  } else if (const auto* lss = std::get_if<HouseLinearStateSpace>(&house)) {
    std::vector<double> next(lss->n, 0.0);
    for (int i = 0; i < lss->n; ++i) {
      double v = lss->b[i] * ambient;
      for (int j = 0; j < lss->n; ++j) v += lss->a[i * lss->n + j] * s.house_state[j];
      next[i] = v;
    }
    s.house_state = std::move(next);
  }
}

// One step of actuation. x_bat: 0 not charging, 1 normal, 2 fast.
struct ControlCommand {
  bool u_fr = false;
  bool u_s = false;
  bool c = false;
  bool d = false;
  int x_bat = 0;

  void validate() const {
    if (c && d) throw std::invalid_argument("plant: charge and discharge both commanded");
    if (x_bat < 0 || x_bat > 2) throw std::invalid_argument("plant: x_bat out of range");
    if (x_bat > 0 && !c) throw std::invalid_argument("plant: x_bat > 0 requires c = 1");
    if (x_bat == 0 && c) throw std::invalid_argument("plant: c = 1 requires x_bat > 0");
  }
};

struct StepAccounting {
  double e_pv_avail = 0.0;
  double e_pv_used = 0.0;
  double e_hl = 0.0;
  double e_fr = 0.0;
  double e_s_desired = 0.0;
  double e_s_served = 0.0;
  double e_c = 0.0;
  double e_dc = 0.0;  // delivered to the bus; battery draw is e_dc / eta_dc
  bool shed_secondary = false;
  bool shed_fridge = false;
  bool compressor_run = false;
  double t_house = 0.0;
};

// Hysteresis: on above t_fr_max, off below t_fr_min, previous latch otherwise.
inline bool thermostat(const PlantState& s, const SystemConfig& cfg) {
  if (s.t_fr > cfg.t_fr_max) return true;
  if (s.t_fr < cfg.t_fr_min) return false;
  return s.compressor_on;
}

// Advances the plant one step. Pure function of (state, inputs): infeasible
// commands are resolved by shedding, secondary load first, then fridge.
inline std::pair<PlantState, StepAccounting> step(const PlantState& state,
                                                  const ControlCommand& cmd, double ghi,
                                                  double e_s_desired, double ambient,
                                                  const SystemConfig& cfg,
                                                  const FridgeDiscretization& disc,
                                                  const HouseModel& house, double dt_hours) {
  cmd.validate();
  StepAccounting acct;
  acct.e_pv_avail = pv_energy(cfg, ghi, dt_hours);
  acct.e_s_desired = e_s_desired;
  acct.t_house = house_output(house, state, ambient);

  const bool desire = thermostat(state, cfg);
  bool compressor_run = cmd.u_fr && desire;
  const double e_fr_full = cfg.p_fr_rated * dt_hours;
  double e_fr = compressor_run ? e_fr_full : 0.0;
  double e_s_served = cmd.u_s ? e_s_desired : 0.0;

  // The battery can deliver at most (E_bat - floor) * eta_dc to the bus, so
  // the Eq. (5) draw e_dc/eta_dc can never cross the floor.
  const double deliverable =
      cmd.d ? std::min((state.e_bat - cfg.e_bat_min) * cfg.eta_dc, cfg.e_bat_dc_max) : 0.0;

  auto house_load = [&](double fr, double s) { return (fr + s) / cfg.eta_inv; };
  double e_hl = house_load(e_fr, e_s_served);
  const double slack = 1e-9;
  if (acct.e_pv_avail + deliverable + slack < e_hl && e_s_served > 0.0) {
    e_s_served = 0.0;
    acct.shed_secondary = true;
    e_hl = house_load(e_fr, 0.0);
  }
  if (acct.e_pv_avail + deliverable + slack < e_hl && compressor_run) {
    compressor_run = false;
    e_fr = 0.0;
    acct.shed_fridge = true;
    e_hl = house_load(0.0, e_s_served);
  }

  const double surplus = std::max(acct.e_pv_avail - e_hl, 0.0);
  const double deficit = std::max(e_hl - acct.e_pv_avail, 0.0);
  const double charge_cap =
      cmd.x_bat == 2 ? cfg.fast_charge_multiplier * cfg.e_bat_c_max
                     : static_cast<double>(cmd.x_bat) * cfg.e_bat_c_max;
  const double e_c =
      cmd.c ? std::min({surplus, cfg.e_bat_max - state.e_bat, charge_cap}) : 0.0;
  const double e_dc = cmd.d ? std::min(deficit, deliverable) : 0.0;

  acct.e_fr = e_fr;
  acct.e_s_served = e_s_served;
  acct.e_hl = e_hl;
  acct.e_c = std::max(e_c, 0.0);
  acct.e_dc = e_dc;
  acct.e_pv_used = e_hl - e_dc + acct.e_c;
  acct.compressor_run = compressor_run;

  PlantState next = state;
  next.e_bat = state.e_bat + cfg.eta_c * acct.e_c - acct.e_dc / cfg.eta_dc;
  next.t_fr = disc.a * state.t_fr + disc.b * (compressor_run ? 1.0 : 0.0) * disc.q_fr +
              disc.d * acct.t_house;
  next.compressor_on = desire;
  next.step = state.step + 1;
  house_advance(house, next, ambient, dt_hours);
  return {next, acct};
}

}  // namespace homeres::plant
