// SPDX-License-Identifier: Apache-2.0
#pragma once

// Shared test-only helpers: random feasible LP/MILP instance generators and
// the exhaustive-enumeration oracle the branch-and-bound is checked against.
// The oracle fixes every binary assignment in turn and solves the remaining
// LP, independent of the solver's branching path.

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "homeres/milp.hpp"

namespace testutil {

using homeres::milp::MilpProblem;
using homeres::milp::Relation;
using homeres::milp::SolveStatus;

// Feasibility by construction: constraints are anchored on a random interior
// point, so the instance always admits at least one solution.
inline MilpProblem random_feasible_milp(std::mt19937& rng, int max_binaries, int max_continuous,
                                        int max_rows) {
  std::uniform_int_distribution<int> nb_dist(0, max_binaries);
  std::uniform_int_distribution<int> nc_dist(max_binaries > 0 ? 0 : 1, max_continuous);
  std::uniform_real_distribution<double> coef(-5.0, 5.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  MilpProblem p;
  const int nb = nb_dist(rng);
  const int nc = nb == 0 ? std::max(1, nc_dist(rng)) : nc_dist(rng);
  std::vector<double> anchor;
  for (int i = 0; i < nb; ++i) {
    p.add_variable(0.0, 1.0, coef(rng), true);
    anchor.push_back(unit(rng) < 0.5 ? 0.0 : 1.0);
  }
  for (int i = 0; i < nc; ++i) {
    const double lo = -4.0 * unit(rng);
    const double hi = lo + 0.5 + 4.5 * unit(rng);
    p.add_variable(lo, hi, coef(rng));
    anchor.push_back(lo + (hi - lo) * unit(rng));
  }

  std::uniform_int_distribution<int> m_dist(1, max_rows);
  std::uniform_int_distribution<int> rel_dist(0, 2);
  const int m = m_dist(rng);
  for (int r = 0; r < m; ++r) {
    std::uniform_int_distribution<int> k_dist(1, std::min(p.num_vars, 6));
    const int k = k_dist(rng);
    std::vector<int> vars;
    std::uniform_int_distribution<int> v_dist(0, p.num_vars - 1);
    while (static_cast<int>(vars.size()) < k) {
      const int v = v_dist(rng);
      bool dup = false;
      for (int u : vars) dup |= (u == v);
      if (!dup) vars.push_back(v);
    }
    std::vector<std::pair<int, double>> terms;
    double activity = 0.0;
    for (int v : vars) {
      const double a = coef(rng);
      terms.push_back({v, a});
      activity += a * anchor[v];
    }
    const int rel = rel_dist(rng);
    if (rel == 0) {
      p.add_constraint(Relation::LessEq, activity + 3.0 * unit(rng), std::move(terms));
    } else if (rel == 1) {
      p.add_constraint(Relation::GreaterEq, activity - 3.0 * unit(rng), std::move(terms));
    } else {
      p.add_constraint(Relation::Equal, activity, std::move(terms));
    }
  }
  return p;
}

inline MilpProblem random_feasible_lp(std::mt19937& rng, int max_continuous, int max_rows) {
  return random_feasible_milp(rng, 0, max_continuous, max_rows);
}

// Brute force over all binary assignments; +inf when no assignment is
// LP-feasible.
inline double enumerate_milp_objective(const MilpProblem& p) {
  std::vector<int> bins;
  for (int j = 0; j < p.num_vars; ++j) {
    if (p.binary[j]) bins.push_back(j);
  }
  double best = std::numeric_limits<double>::infinity();
  const std::uint64_t count = std::uint64_t{1} << bins.size();
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    std::vector<double> lo = p.lower, hi = p.upper;
    bool ok = true;
    for (std::size_t i = 0; i < bins.size(); ++i) {
      const double v = (mask >> i) & 1 ? 1.0 : 0.0;
      if (v < p.lower[bins[i]] - 1e-12 || v > p.upper[bins[i]] + 1e-12) {
        ok = false;
        break;
      }
      lo[bins[i]] = hi[bins[i]] = v;
    }
    if (!ok) continue;
    const auto sol = homeres::milp::detail::solve_lp_bounded(p, lo, hi);
    if (sol.status == SolveStatus::Optimal) best = std::min(best, sol.objective_value);
  }
  return best;
}

// Strong-duality value computed from the final basis: y'b plus the reduced
// costs of nonbasic structurals at their active bounds.
inline double dual_objective(const MilpProblem& p, const homeres::milp::LpSolution& sol) {
  double v = 0.0;
  for (std::size_t i = 0; i < p.constraints.size(); ++i) v += sol.duals[i] * p.constraints[i].rhs;
  for (int j = 0; j < p.num_vars; ++j) {
    if (sol.var_status[j] == 1 || sol.var_status[j] == 2) {
      v += sol.reduced_costs[j] * sol.x[j];
    }
  }
  return v;
}

}  // namespace testutil
