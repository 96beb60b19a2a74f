// SPDX-License-Identifier: Apache-2.0
#pragma once

// Primary/Secondary Resiliency Metrics and aggregate accounting over a
// completed run trace, plus the step-by-step invariant audit used by the
// verification suites. All pure functions of the trace.

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

#include "homeres/csv.hpp"
#include "homeres/plant.hpp"
#include "homeres/trace.hpp"

namespace homeres::metrics {

struct EmptyTrace : std::runtime_error {
  EmptyTrace() : std::runtime_error("metrics: empty trace") {}
};
struct NoSecondaryDemand : std::runtime_error {
  NoSecondaryDemand() : std::runtime_error("metrics: trace has no secondary demand") {}
};

// PRM tolerance band above the fridge upper limit, fixed by the metric's
// definition.
constexpr double kPrmToleranceC = 2.0;

// Hours per day the fridge stayed within the tolerable band, evaluated on
// end-of-step temperatures.
inline double compute_prm(const RunTrace& trace, const plant::SystemConfig& sys) {
  if (trace.rows.empty()) throw EmptyTrace{};
  const double threshold = sys.t_fr_max + kPrmToleranceC;
  double violation_hours = 0.0;
  for (const auto& r : trace.rows) {
    if (r.t_fr_after > threshold) violation_hours += trace.dt_hours;
  }
  return std::clamp(24.0 * (1.0 - violation_hours / trace.t_sim_hours()), 0.0, 24.0);
}

// Percentage of steps with secondary demand in which the demand was served
// in full. Steps without demand count toward neither side.
inline double compute_srm(const RunTrace& trace) {
  if (trace.rows.empty()) throw EmptyTrace{};
  long desired = 0, served = 0;
  for (const auto& r : trace.rows) {
    if (r.acct.e_s_desired > 0.0) {
      ++desired;
      if (r.acct.e_s_served >= r.acct.e_s_desired - 1e-9) ++served;
    }
  }
  if (desired == 0) throw NoSecondaryDemand{};
  return 100.0 * static_cast<double>(served) / static_cast<double>(desired);
}

struct ResiliencyReport {
  double prm_hours_per_day = 0.0;
  double srm_pct = 0.0;
  double violation_hours = 0.0;
  double unserved_secondary_wh = 0.0;
  double fast_charge_hours_used = 0.0;
  double solver_success_pct = 100.0;  // 100 by convention for rule controllers
  double avg_solve_time_seconds = 0.0;
};

inline ResiliencyReport summarize(const RunTrace& trace, const plant::SystemConfig& sys) {
  ResiliencyReport rep;
  rep.prm_hours_per_day = compute_prm(trace, sys);
  try {
    rep.srm_pct = compute_srm(trace);
  } catch (const NoSecondaryDemand&) {
    rep.srm_pct = 100.0;
  }
  const double threshold = sys.t_fr_max + kPrmToleranceC;
  long solver_steps = 0, solver_ok = 0;
  double time_sum = 0.0;
  for (const auto& r : trace.rows) {
    if (r.t_fr_after > threshold) rep.violation_hours += trace.dt_hours;
    rep.unserved_secondary_wh += r.acct.e_s_desired - r.acct.e_s_served;
    if (r.cmd.x_bat == 2) rep.fast_charge_hours_used += trace.dt_hours;
    if (r.diag) {
      ++solver_steps;
      if (r.diag->status == milp::SolveStatus::Optimal) ++solver_ok;
      time_sum += r.diag->solve_time_seconds;
    }
  }
  if (solver_steps > 0) {
    rep.solver_success_pct = 100.0 * static_cast<double>(solver_ok) / solver_steps;
    rep.avg_solve_time_seconds = time_sum / static_cast<double>(solver_steps);
  }
  return rep;
}

inline std::string to_kv_text(const ResiliencyReport& r) {
  std::ostringstream os;
  os << "prm_hours_per_day=" << csv::fmt(r.prm_hours_per_day) << "\n"
     << "srm_pct=" << csv::fmt(r.srm_pct) << "\n"
     << "violation_hours=" << csv::fmt(r.violation_hours) << "\n"
     << "unserved_secondary_wh=" << csv::fmt(r.unserved_secondary_wh) << "\n"
     << "fast_charge_hours_used=" << csv::fmt(r.fast_charge_hours_used) << "\n"
     << "solver_success_pct=" << csv::fmt(r.solver_success_pct) << "\n"
     << "avg_solve_time_seconds=" << csv::fmt(r.avg_solve_time_seconds) << "\n";
  return os.str();
}

// Step-by-step physical invariants: battery inside bounds, exact energy
// balance, mutually exclusive charge/discharge, command well-formedness,
// thermostat hysteresis consistency. Also tracks which hysteresis branches
// the run exercised.
struct AuditResult {
  bool ok = true;
  std::string first_failure;
  long violations = 0;
  bool saw_thermostat_on = false;     // above band -> on
  bool saw_thermostat_off = false;    // below band -> off
  bool saw_thermostat_latch = false;  // in band -> previous state
};

inline AuditResult audit_trace(const RunTrace& trace, const plant::SystemConfig& sys) {
  AuditResult res;
  auto fail = [&](long step, const std::string& what) {
    ++res.violations;
    if (res.ok) {
      res.ok = false;
      res.first_failure = "step " + std::to_string(step) + ": " + what;
    }
  };
  const double tol = 1e-9;
  for (const auto& r : trace.rows) {
    if (r.e_bat_after < sys.e_bat_min - tol || r.e_bat_after > sys.e_bat_max + tol) {
      fail(r.step, "battery outside bounds: " + csv::fmt(r.e_bat_after));
    }
    const double balance = r.acct.e_pv_used + r.acct.e_dc - r.acct.e_hl - r.acct.e_c;
    if (std::abs(balance) > tol) fail(r.step, "energy balance off by " + csv::fmt(balance));
    if (r.acct.e_c > tol && r.acct.e_dc > tol) fail(r.step, "charge and discharge both nonzero");
    if (r.acct.e_pv_used > r.acct.e_pv_avail + tol) fail(r.step, "PV used exceeds available");
    if (r.acct.e_pv_used < -tol || r.acct.e_c < -tol || r.acct.e_dc < -tol ||
        r.acct.e_hl < -tol || r.acct.e_fr < -tol || r.acct.e_s_served < -tol) {
      fail(r.step, "negative accounting entry");
    }
    const double charge_cap = r.cmd.x_bat == 2
                                  ? sys.fast_charge_multiplier * sys.e_bat_c_max
                                  : static_cast<double>(r.cmd.x_bat) * sys.e_bat_c_max;
    if (r.acct.e_c > charge_cap + tol) fail(r.step, "charging above commanded cap");
    if (r.acct.e_dc > sys.e_bat_dc_max + tol) fail(r.step, "discharge above cap");
    try {
      r.cmd.validate();
    } catch (const std::exception& e) {
      fail(r.step, e.what());
    }
    // Hysteresis: recompute the thermostat decision from the pre-step state.
    bool expected;
    if (r.t_fr_before > sys.t_fr_max) {
      expected = true;
      res.saw_thermostat_on = true;
    } else if (r.t_fr_before < sys.t_fr_min) {
      expected = false;
      res.saw_thermostat_off = true;
    } else {
      expected = r.latch_before;
      res.saw_thermostat_latch = true;
    }
    if (r.latch_after != expected) fail(r.step, "thermostat latch mismatch");
    if (r.acct.compressor_run && !(r.cmd.u_fr && expected && !r.acct.shed_fridge)) {
      fail(r.step, "compressor ran without gate and thermostat demand");
    }
  }
  return res;
}

}  // namespace homeres::metrics
