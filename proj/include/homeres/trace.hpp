// SPDX-License-Identifier: Apache-2.0
#pragma once

// Per-step record of a closed-loop run and its CSV form. State columns
// (t_fr, e_bat) are end-of-step values. Solver fields are blank for the rule
// controllers. Wall-clock solve time is deliberately not part of the trace
// so that identical runs produce byte-identical files; timings are reported
// separately.

#include <optional>
#include <string>
#include <vector>

#include "homeres/csv.hpp"
#include "homeres/datetime.hpp"
#include "homeres/mpc.hpp"
#include "homeres/plant.hpp"

namespace homeres {

struct TraceRow {
  long step = 0;
  DateTime timestamp;
  double t_fr_before = 0.0;
  bool latch_before = false;
  plant::ControlCommand cmd;
  plant::StepAccounting acct;
  double t_fr_after = 0.0;
  double e_bat_after = 0.0;
  bool latch_after = false;
  std::optional<mpc::MpcDiagnostics> diag;
};

struct RunTrace {
  std::vector<TraceRow> rows;
  double dt_hours = 0.0;

  double t_sim_hours() const { return static_cast<double>(rows.size()) * dt_hours; }
};

inline std::string trace_csv_header() {
  return "step,timestamp,t_fr,e_bat,u_fr,u_s,c,d,x_bat,compressor_run,e_pv_avail,e_pv_used,"
         "e_hl,e_c,e_dc,shed_secondary,shed_fridge,t_house,solver_status,solver_nodes,"
         "solver_objective,gamma";
}

inline std::string trace_csv_row(const TraceRow& r) {
  std::string out;
  out.reserve(256);
  auto add = [&](const std::string& s) {
    out += s;
    out += ',';
  };
  add(std::to_string(r.step));
  add(r.timestamp.to_string());
  add(csv::fmt(r.t_fr_after));
  add(csv::fmt(r.e_bat_after));
  add(r.cmd.u_fr ? "1" : "0");
  add(r.cmd.u_s ? "1" : "0");
  add(r.cmd.c ? "1" : "0");
  add(r.cmd.d ? "1" : "0");
  add(std::to_string(r.cmd.x_bat));
  add(r.acct.compressor_run ? "1" : "0");
  add(csv::fmt(r.acct.e_pv_avail));
  add(csv::fmt(r.acct.e_pv_used));
  add(csv::fmt(r.acct.e_hl));
  add(csv::fmt(r.acct.e_c));
  add(csv::fmt(r.acct.e_dc));
  add(r.acct.shed_secondary ? "1" : "0");
  add(r.acct.shed_fridge ? "1" : "0");
  add(csv::fmt(r.acct.t_house));
  if (r.diag) {
    add(milp::to_string(r.diag->status));
    add(std::to_string(r.diag->nodes));
    add(csv::fmt(r.diag->objective));
    out += csv::fmt(r.diag->gamma);
  } else {
    out += ",,,";
  }
  return out;
}

inline std::string trace_to_csv(const RunTrace& trace) {
  std::string out = trace_csv_header();
  out += '\n';
  for (const auto& r : trace.rows) {
    out += trace_csv_row(r);
    out += '\n';
  }
  return out;
}

}  // namespace homeres
