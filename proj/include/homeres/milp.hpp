// SPDX-License-Identifier: Apache-2.0
#pragma once

// Self-contained solver for small mixed-integer linear programs: a revised
// simplex method for LPs with lower/upper-bounded variables (box constraints
// never enter the constraint matrix) plus best-first branch-and-bound on
// binary variables. Sized for problems of a few hundred variables; the basis
// inverse is kept dense and refactorized periodically.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace homeres::milp {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kFeasTol = 1e-7;   // feasibility, scaled by row magnitude
constexpr double kIntTol = 1e-6;    // binary integrality
constexpr double kGapTol = 1e-6;    // absolute incumbent pruning gap
constexpr double kPivotTol = 1e-9;  // smallest acceptable pivot element

enum class Relation { LessEq, Equal, GreaterEq };

enum class SolveStatus { Optimal, Infeasible, Unbounded, NodeLimit, Stalled };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::NodeLimit: return "node_limit";
    case SolveStatus::Stalled: return "stalled";
  }
  return "?";
}

struct Constraint {
  std::vector<std::pair<int, double>> terms;
  Relation rel = Relation::LessEq;
  double rhs = 0.0;
};

struct MilpProblem {
  int num_vars = 0;
  std::vector<double> objective;  // dense cost vector, minimized
  std::vector<Constraint> constraints;
  std::vector<double> lower, upper;
  std::vector<char> binary;

  int add_variable(double lo, double hi, double cost = 0.0, bool is_binary = false) {
    lower.push_back(lo);
    upper.push_back(hi);
    objective.push_back(cost);
    binary.push_back(is_binary ? 1 : 0);
    return num_vars++;
  }

  void add_constraint(Relation rel, double rhs, std::vector<std::pair<int, double>> terms) {
    constraints.push_back(Constraint{std::move(terms), rel, rhs});
  }

  void validate() const {
    auto bad = [](double v) { return std::isnan(v); };
    if (static_cast<int>(objective.size()) != num_vars ||
        static_cast<int>(lower.size()) != num_vars ||
        static_cast<int>(upper.size()) != num_vars ||
        static_cast<int>(binary.size()) != num_vars) {
      throw std::invalid_argument("milp: inconsistent problem arrays");
    }
    for (int j = 0; j < num_vars; ++j) {
      if (bad(objective[j]) || bad(lower[j]) || bad(upper[j])) {
        throw std::invalid_argument("milp: NaN coefficient on variable " + std::to_string(j));
      }
      if (lower[j] > upper[j]) {
        throw std::invalid_argument("milp: empty bound interval on variable " + std::to_string(j));
      }
      if (binary[j] && (lower[j] < -kIntTol || upper[j] > 1 + kIntTol)) {
        throw std::invalid_argument("milp: binary variable " + std::to_string(j) +
                                    " has bounds outside [0,1]");
      }
    }
    for (const auto& c : constraints) {
      if (bad(c.rhs)) throw std::invalid_argument("milp: NaN rhs");
      for (const auto& [j, a] : c.terms) {
        if (j < 0 || j >= num_vars) throw std::invalid_argument("milp: column index out of range");
        if (bad(a)) throw std::invalid_argument("milp: NaN constraint coefficient");
      }
    }
  }
};

struct LpSolution {
  SolveStatus status = SolveStatus::Stalled;
  std::vector<double> x;              // structural variable values
  double objective_value = 0.0;
  std::vector<double> duals;          // one multiplier per constraint row
  std::vector<double> reduced_costs;  // per structural variable
  std::vector<int> var_status;        // 0 basic, 1 at lower, 2 at upper, 3 free nonbasic
  long iterations = 0;
};

struct MilpSolution {
  SolveStatus status = SolveStatus::Stalled;
  std::vector<double> x;
  double objective_value = 0.0;
  long nodes_explored = 0;
  double solve_time_seconds = 0.0;
};

struct SolveLimits {
  long max_nodes = 100000;
  double max_seconds = 10.0;
};

namespace detail {

enum class VarState : std::uint8_t { Basic, AtLower, AtUpper, Free };

// Bounded-variable revised simplex over the equality form [A | I] x = b.
// Dense explicit basis inverse, product-form updates, full refactorization
// every kRefactorInterval pivots, Bland's rule after a degeneracy streak.
class Simplex {
 public:
  static constexpr int kRefactorInterval = 50;
  static constexpr int kDegenerateStreakLimit = 30;

  Simplex(const MilpProblem& p, std::span<const double> lo, std::span<const double> hi)
      : n_(p.num_vars), m_(static_cast<int>(p.constraints.size())) {
    cols_.resize(n_ + m_);
    for (int i = 0; i < m_; ++i) {
      for (const auto& [j, a] : p.constraints[i].terms) {
        if (a != 0.0) add_entry(cols_[j], i, a);
      }
      cols_[n_ + i].push_back({i, 1.0});
    }
    rhs_.resize(m_);
    lower_.assign(lo.begin(), lo.end());
    upper_.assign(hi.begin(), hi.end());
    for (int i = 0; i < m_; ++i) {
      rhs_[i] = p.constraints[i].rhs;
      switch (p.constraints[i].rel) {
        case Relation::LessEq:
          lower_.push_back(0.0);
          upper_.push_back(kInf);
          break;
        case Relation::Equal:
          lower_.push_back(0.0);
          upper_.push_back(0.0);
          break;
        case Relation::GreaterEq:
          lower_.push_back(-kInf);
          upper_.push_back(0.0);
          break;
      }
    }
    cost_.assign(n_ + m_, 0.0);
    for (int j = 0; j < n_; ++j) cost_[j] = p.objective[j];
  }

  // Runs phase 1 + phase 2; returns Optimal/Infeasible/Unbounded/Stalled.
  SolveStatus solve() {
    place_nonbasics();
    if (m_ == 0) return solve_unconstrained();
    build_initial_basis();
    if (num_artificials_ > 0) {
      phase1_ = true;
      const SolveStatus s1 = iterate();
      phase1_ = false;
      if (s1 != SolveStatus::Optimal) {
        return s1 == SolveStatus::Unbounded ? SolveStatus::Stalled : s1;
      }
      double infeas = 0.0;
      for (int j = n_ + m_; j < total(); ++j) infeas += std::abs(x_[j]);
      if (infeas > kFeasTol * (1.0 + rhs_scale())) return SolveStatus::Infeasible;
      // Pin leftover artificials to zero for phase 2.
      for (int j = n_ + m_; j < total(); ++j) {
        lower_[j] = upper_[j] = 0.0;
        if (state_[j] != VarState::Basic) x_[j] = 0.0;
      }
    }
    return iterate();
  }

  double objective_value() const {
    double v = 0.0;
    for (int j = 0; j < n_; ++j) v += cost_[j] * x_[j];
    return v;
  }

  std::vector<double> structural_x() const { return {x_.begin(), x_.begin() + n_}; }

  // y = c_B' B^{-1} for the final basis, true costs.
  std::vector<double> duals() const {
    std::vector<double> y(m_, 0.0);
    for (int r = 0; r < m_; ++r) {
      const double cb = cost_of(basic_[r]);
      if (cb == 0.0) continue;
      for (int i = 0; i < m_; ++i) y[i] += cb * binv_[r * m_ + i];
    }
    return y;
  }

  double reduced_cost(const std::vector<double>& y, int j) const {
    double d = cost_of(j);
    for (const auto& [i, a] : cols_[j]) d -= y[i] * a;
    return d;
  }

  VarState state_of(int j) const { return state_[j]; }
  long iterations() const { return iters_; }

  // Re-solves after a change of structural bounds, reusing the current basis:
  // nonbasic variables are re-seated (and bound-flipped where the reduced
  // cost demands it), then dual simplex pivots restore primal feasibility.
  // Returns Stalled when the warm path cannot proceed; callers fall back to
  // a cold solve.
  SolveStatus warm_bound_solve(std::span<const double> lo, std::span<const double> hi) {
    if (basic_.empty()) return SolveStatus::Stalled;
    for (int j = 0; j < n_; ++j) {
      lower_[j] = lo[j];
      upper_[j] = hi[j];
    }
    std::vector<double> y(m_, 0.0);
    for (int r = 0; r < m_; ++r) {
      const double cb = cost_of(basic_[r]);
      if (cb == 0.0) continue;
      for (int i = 0; i < m_; ++i) y[i] += cb * binv_[r * m_ + i];
    }
    for (int j = 0; j < total(); ++j) {
      if (state_[j] == VarState::Basic || state_[j] == VarState::Free) continue;
      if (state_[j] == VarState::AtLower && lower_[j] <= -kInf) return SolveStatus::Stalled;
      if (state_[j] == VarState::AtUpper && upper_[j] >= kInf) return SolveStatus::Stalled;
      x_[j] = state_[j] == VarState::AtLower ? lower_[j] : upper_[j];
      if (is_fixed(j)) continue;
      const double d = reduced_cost(y, j);
      if (state_[j] == VarState::AtLower && d < -1e-9) {
        if (upper_[j] >= kInf) return SolveStatus::Stalled;
        state_[j] = VarState::AtUpper;
        x_[j] = upper_[j];
      } else if (state_[j] == VarState::AtUpper && d > 1e-9) {
        if (lower_[j] <= -kInf) return SolveStatus::Stalled;
        state_[j] = VarState::AtLower;
        x_[j] = lower_[j];
      }
    }
    recompute_basic_values();
    return dual_iterate();
  }

 private:
  int total() const { return static_cast<int>(cols_.size()); }

  double cost_of(int j) const {
    if (phase1_) return j >= n_ + m_ ? 1.0 : 0.0;
    return j < static_cast<int>(cost_.size()) ? cost_[j] : 0.0;
  }

  static void add_entry(std::vector<std::pair<int, double>>& col, int row, double a) {
    for (auto& [r, v] : col) {
      if (r == row) {
        v += a;
        return;
      }
    }
    col.push_back({row, a});
  }

  double rhs_scale() const {
    double s = 0.0;
    for (double b : rhs_) s = std::max(s, std::abs(b));
    return s;
  }

  bool is_fixed(int j) const { return upper_[j] - lower_[j] <= 1e-12; }

  void place_nonbasics() {
    x_.assign(total(), 0.0);
    state_.assign(total(), VarState::AtLower);
    for (int j = 0; j < total(); ++j) {
      if (lower_[j] > -kInf) {
        state_[j] = VarState::AtLower;
        x_[j] = lower_[j];
      } else if (upper_[j] < kInf) {
        state_[j] = VarState::AtUpper;
        x_[j] = upper_[j];
      } else {
        state_[j] = VarState::Free;
        x_[j] = 0.0;
      }
    }
  }

  SolveStatus solve_unconstrained() {
    for (int j = 0; j < n_; ++j) {
      if (cost_[j] > 0.0) {
        if (lower_[j] <= -kInf) return SolveStatus::Unbounded;
        x_[j] = lower_[j];
        state_[j] = VarState::AtLower;
      } else if (cost_[j] < 0.0) {
        if (upper_[j] >= kInf) return SolveStatus::Unbounded;
        x_[j] = upper_[j];
        state_[j] = VarState::AtUpper;
      }
    }
    return SolveStatus::Optimal;
  }

  // Slack basic where its bounds absorb the row residual, artificial
  // (cost 1 in phase 1) otherwise.
  void build_initial_basis() {
    basic_.assign(m_, -1);
    std::vector<double> activity(m_, 0.0);
    for (int j = 0; j < n_; ++j) {
      if (x_[j] == 0.0) continue;
      for (const auto& [i, a] : cols_[j]) activity[i] += a * x_[j];
    }
    num_artificials_ = 0;
    for (int i = 0; i < m_; ++i) {
      const int sj = n_ + i;
      const double need = rhs_[i] - activity[i];
      const double clamped = std::clamp(need, lower_[sj], upper_[sj]);
      if (std::abs(need - clamped) <= 1e-12) {
        basic_[i] = sj;
        state_[sj] = VarState::Basic;
        x_[sj] = need;
      } else {
        x_[sj] = clamped;
        const double resid = need - clamped;
        const double sig = resid >= 0 ? 1.0 : -1.0;
        cols_.push_back({{i, sig}});
        lower_.push_back(0.0);
        upper_.push_back(kInf);
        const int aj = total() - 1;
        basic_[i] = aj;
        state_.push_back(VarState::Basic);
        x_.push_back(std::abs(resid));
        ++num_artificials_;
      }
    }
    refactorize();
  }

  void refactorize() {
    // Gauss-Jordan inverse of B with partial pivoting.
    binv_.assign(static_cast<std::size_t>(m_) * m_, 0.0);
    std::vector<double> work(static_cast<std::size_t>(m_) * m_, 0.0);
    for (int r = 0; r < m_; ++r) {
      for (const auto& [i, a] : cols_[basic_[r]]) work[i * m_ + r] = a;
      binv_[r * m_ + r] = 1.0;
    }
    for (int col = 0; col < m_; ++col) {
      int piv = col;
      double best = std::abs(work[col * m_ + col]);
      for (int r = col + 1; r < m_; ++r) {
        const double v = std::abs(work[r * m_ + col]);
        if (v > best) {
          best = v;
          piv = r;
        }
      }
      if (best < kPivotTol) throw std::runtime_error("milp: singular basis");
      if (piv != col) {
        // Row exchange on the augmented system [B | binv]; column order of B
        // (the basic_ array) is untouched by row operations.
        for (int k = 0; k < m_; ++k) {
          std::swap(work[piv * m_ + k], work[col * m_ + k]);
          std::swap(binv_[piv * m_ + k], binv_[col * m_ + k]);
        }
      }
      const double inv = 1.0 / work[col * m_ + col];
      for (int k = 0; k < m_; ++k) {
        work[col * m_ + k] *= inv;
        binv_[col * m_ + k] *= inv;
      }
      for (int r = 0; r < m_; ++r) {
        if (r == col) continue;
        const double f = work[r * m_ + col];
        if (f == 0.0) continue;
        for (int k = 0; k < m_; ++k) {
          work[r * m_ + k] -= f * work[col * m_ + k];
          binv_[r * m_ + k] -= f * binv_[col * m_ + k];
        }
      }
    }
    recompute_basic_values();
    pivots_since_refactor_ = 0;
  }

  void recompute_basic_values() {
    std::vector<double> r = rhs_;
    for (int j = 0; j < total(); ++j) {
      if (state_[j] == VarState::Basic || x_[j] == 0.0) continue;
      for (const auto& [i, a] : cols_[j]) r[i] -= a * x_[j];
    }
    for (int row = 0; row < m_; ++row) {
      double v = 0.0;
      for (int i = 0; i < m_; ++i) v += binv_[row * m_ + i] * r[i];
      x_[basic_[row]] = v;
    }
  }

  std::vector<double> ftran(int j) const {
    std::vector<double> w(m_, 0.0);
    for (const auto& [i, a] : cols_[j]) {
      for (int r = 0; r < m_; ++r) w[r] += binv_[r * m_ + i] * a;
    }
    return w;
  }

  SolveStatus iterate() {
    const long cap = 2000 + 200L * (n_ + m_);
    int degen_streak = 0;
    bool bland = false;
    const double dj_tol = 1e-9;
    while (true) {
      if (++iters_ > cap) return SolveStatus::Stalled;
      // Pricing.
      std::vector<double> y(m_, 0.0);
      for (int r = 0; r < m_; ++r) {
        const double cb = cost_of(basic_[r]);
        if (cb == 0.0) continue;
        for (int i = 0; i < m_; ++i) y[i] += cb * binv_[r * m_ + i];
      }
      int enter = -1;
      double best_viol = dj_tol;
      int dir = 0;
      for (int j = 0; j < total(); ++j) {
        if (state_[j] == VarState::Basic || is_fixed(j)) continue;
        const double d = reduced_cost(y, j);
        double viol = 0.0;
        int cand_dir = 0;
        if (state_[j] == VarState::AtLower && d < -dj_tol) {
          viol = -d;
          cand_dir = +1;
        } else if (state_[j] == VarState::AtUpper && d > dj_tol) {
          viol = d;
          cand_dir = -1;
        } else if (state_[j] == VarState::Free && std::abs(d) > dj_tol) {
          viol = std::abs(d);
          cand_dir = d < 0 ? +1 : -1;
        } else {
          continue;
        }
        if (bland) {
          enter = j;
          dir = cand_dir;
          break;
        }
        if (viol > best_viol) {
          best_viol = viol;
          enter = j;
          dir = cand_dir;
        }
      }
      if (enter < 0) return SolveStatus::Optimal;

      const std::vector<double> w = ftran(enter);
      // Ratio test: the entering variable moves by dir * t, basic row r
      // changes at rate -dir * w[r].
      double t_limit = kInf;
      if (lower_[enter] > -kInf && upper_[enter] < kInf) t_limit = upper_[enter] - lower_[enter];
      double best_t = t_limit;
      int leave_row = -1;
      double leave_piv = 0.0;
      bool leave_to_upper = false;
      for (int r = 0; r < m_; ++r) {
        const double delta = -dir * w[r];
        const int bj = basic_[r];
        double ratio;
        bool to_upper;
        if (delta > kPivotTol) {
          if (upper_[bj] >= kInf) continue;
          ratio = (upper_[bj] - x_[bj]) / delta;
          to_upper = true;
        } else if (delta < -kPivotTol) {
          if (lower_[bj] <= -kInf) continue;
          ratio = (x_[bj] - lower_[bj]) / (-delta);
          to_upper = false;
        } else {
          continue;
        }
        if (ratio < 0.0) ratio = 0.0;
        const bool better =
            ratio < best_t - 1e-12 ||
            (ratio < best_t + 1e-12 && leave_row >= 0 &&
             (bland ? bj < basic_[leave_row] : std::abs(w[r]) > std::abs(leave_piv)));
        if (better) {
          best_t = ratio;
          leave_row = r;
          leave_piv = w[r];
          leave_to_upper = to_upper;
        }
      }
      if (best_t >= kInf) return SolveStatus::Unbounded;

      if (leave_row < 0) {
        // Bound flip: entering variable crosses its box to the other side.
        x_[enter] = dir > 0 ? upper_[enter] : lower_[enter];
        state_[enter] = dir > 0 ? VarState::AtUpper : VarState::AtLower;
        for (int r = 0; r < m_; ++r) x_[basic_[r]] -= dir * best_t * w[r];
        degen_streak = 0;
        bland = false;
        continue;
      }

      // Pivot.
      const int leave = basic_[leave_row];
      for (int r = 0; r < m_; ++r) x_[basic_[r]] -= dir * best_t * w[r];
      x_[enter] = x_[enter] + dir * best_t;
      x_[leave] = leave_to_upper ? upper_[leave] : lower_[leave];
      state_[leave] = leave_to_upper ? VarState::AtUpper : VarState::AtLower;
      state_[enter] = VarState::Basic;
      basic_[leave_row] = enter;
      if (leave >= n_ + m_) upper_[leave] = 0.0;  // departed artificial never returns

      // Product-form update of the inverse.
      const double piv = leave_piv;
      if (std::abs(piv) < kPivotTol) {
        refactorize();
      } else {
        double* prow = &binv_[leave_row * m_];
        const double inv = 1.0 / piv;
        for (int k = 0; k < m_; ++k) prow[k] *= inv;
        for (int r = 0; r < m_; ++r) {
          if (r == leave_row) continue;
          const double f = w[r];
          if (f == 0.0) continue;
          double* row = &binv_[r * m_];
          for (int k = 0; k < m_; ++k) row[k] -= f * prow[k];
        }
        if (++pivots_since_refactor_ >= kRefactorInterval) refactorize();
      }

      if (best_t <= 1e-10) {
        if (++degen_streak >= kDegenerateStreakLimit) bland = true;
      } else {
        degen_streak = 0;
        bland = false;
      }
    }
  }

  // Bounded-variable dual simplex: repairs primal feasibility while keeping
  // the reduced-cost sign conditions intact.
  SolveStatus dual_iterate() {
    const long cap = 2000 + 200L * (n_ + m_);
    long iters = 0;
    while (true) {
      if (++iters > cap) return SolveStatus::Stalled;
      ++iters_;
      int leave_row = -1;
      double worst = 0.0;
      bool below = false;
      for (int r = 0; r < m_; ++r) {
        const int bj = basic_[r];
        const double tol = kFeasTol * (1.0 + std::abs(x_[bj]));
        if (x_[bj] < lower_[bj] - tol && lower_[bj] - x_[bj] > worst) {
          worst = lower_[bj] - x_[bj];
          leave_row = r;
          below = true;
        } else if (x_[bj] > upper_[bj] + tol && x_[bj] - upper_[bj] > worst) {
          worst = x_[bj] - upper_[bj];
          leave_row = r;
          below = false;
        }
      }
      if (leave_row < 0) return SolveStatus::Optimal;

      std::vector<double> y(m_, 0.0);
      for (int r = 0; r < m_; ++r) {
        const double cb = cost_of(basic_[r]);
        if (cb == 0.0) continue;
        for (int i = 0; i < m_; ++i) y[i] += cb * binv_[r * m_ + i];
      }
      const double* rho = &binv_[leave_row * m_];
      int enter = -1;
      double best_theta = kInf;
      double best_alpha = 0.0;
      for (int j = 0; j < total(); ++j) {
        if (state_[j] == VarState::Basic || is_fixed(j)) continue;
        double alpha = 0.0;
        for (const auto& [i, a] : cols_[j]) alpha += rho[i] * a;
        bool eligible;
        if (state_[j] == VarState::Free) {
          eligible = std::abs(alpha) > kPivotTol;
        } else if (below) {
          eligible = (state_[j] == VarState::AtLower && alpha < -kPivotTol) ||
                     (state_[j] == VarState::AtUpper && alpha > kPivotTol);
        } else {
          eligible = (state_[j] == VarState::AtLower && alpha > kPivotTol) ||
                     (state_[j] == VarState::AtUpper && alpha < -kPivotTol);
        }
        if (!eligible) continue;
        const double d = reduced_cost(y, j);
        const double theta = std::abs(d) / std::abs(alpha);
        const bool better =
            theta < best_theta - 1e-12 ||
            (theta < best_theta + 1e-12 &&
             (std::abs(alpha) > std::abs(best_alpha) + 1e-12 ||
              (std::abs(alpha) > std::abs(best_alpha) - 1e-12 && (enter < 0 || j < enter))));
        if (better) {
          best_theta = theta;
          best_alpha = alpha;
          enter = j;
        }
      }
      if (enter < 0) return SolveStatus::Infeasible;

      const std::vector<double> w = ftran(enter);
      const int leave = basic_[leave_row];
      x_[leave] = below ? lower_[leave] : upper_[leave];
      state_[leave] = below ? VarState::AtLower : VarState::AtUpper;
      state_[enter] = VarState::Basic;
      basic_[leave_row] = enter;
      if (leave >= n_ + m_) upper_[leave] = 0.0;

      const double piv = w[leave_row];
      if (std::abs(piv) < kPivotTol) {
        try {
          refactorize();
        } catch (const std::runtime_error&) {
          return SolveStatus::Stalled;
        }
      } else {
        double* prow = &binv_[leave_row * m_];
        const double inv = 1.0 / piv;
        for (int k = 0; k < m_; ++k) prow[k] *= inv;
        for (int r = 0; r < m_; ++r) {
          if (r == leave_row) continue;
          const double f = w[r];
          if (f == 0.0) continue;
          double* row = &binv_[r * m_];
          for (int k = 0; k < m_; ++k) row[k] -= f * prow[k];
        }
        if (++pivots_since_refactor_ >= kRefactorInterval) {
          try {
            refactorize();
            continue;  // refactorize already recomputed values
          } catch (const std::runtime_error&) {
            return SolveStatus::Stalled;
          }
        }
      }
      recompute_basic_values();
    }
  }

  int n_ = 0, m_ = 0;
  std::vector<std::vector<std::pair<int, double>>> cols_;
  std::vector<double> rhs_, lower_, upper_, cost_, x_, binv_;
  std::vector<VarState> state_;
  std::vector<int> basic_;
  int num_artificials_ = 0;
  int pivots_since_refactor_ = 0;
  bool phase1_ = false;
  long iters_ = 0;
};

inline LpSolution solve_lp_bounded(const MilpProblem& p, std::span<const double> lo,
                                   std::span<const double> hi) {
  LpSolution out;
  Simplex s(p, lo, hi);
  try {
    out.status = s.solve();
  } catch (const std::runtime_error&) {
    out.status = SolveStatus::Stalled;
    return out;
  }
  out.iterations = s.iterations();
  if (out.status != SolveStatus::Optimal) return out;
  out.x = s.structural_x();
  out.objective_value = s.objective_value();
  out.duals = s.duals();
  out.reduced_costs.resize(p.num_vars);
  out.var_status.resize(p.num_vars);
  for (int j = 0; j < p.num_vars; ++j) {
    out.reduced_costs[j] = s.reduced_cost(out.duals, j);
    switch (s.state_of(j)) {
      case VarState::Basic: out.var_status[j] = 0; break;
      case VarState::AtLower: out.var_status[j] = 1; break;
      case VarState::AtUpper: out.var_status[j] = 2; break;
      case VarState::Free: out.var_status[j] = 3; break;
    }
  }
  return out;
}

}  // namespace detail

// LP relaxation solve: binaries keep their bounds but integrality is dropped.
inline LpSolution solve_lp(const MilpProblem& p) {
  p.validate();
  return detail::solve_lp_bounded(p, p.lower, p.upper);
}

// Best-first branch-and-bound with a depth-first dive on the child that
// fixes the branching binary toward its relaxation value. Branching picks
// the binary with fractional value closest to 0.5 (ties: lowest index).
// An optional hint seeds the incumbent: its rounded binaries are fixed and
// the continuous part re-solved; an infeasible hint is silently ignored.
inline MilpSolution solve_milp(const MilpProblem& p, const SolveLimits& limits = {},
                               const std::vector<double>* hint = nullptr) {
  p.validate();
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  MilpSolution out;
  std::vector<double> lo = p.lower, hi = p.upper;
  std::vector<int> bin_cols;
  for (int j = 0; j < p.num_vars; ++j) {
    if (p.binary[j]) bin_cols.push_back(j);
  }

  bool have_inc = false;
  std::vector<double> inc_x;
  double inc_obj = kInf;

  if (hint && static_cast<int>(hint->size()) == p.num_vars && !bin_cols.empty()) {
    std::vector<double> hlo = p.lower, hhi = p.upper;
    bool in_bounds = true;
    for (int j : bin_cols) {
      const double v = std::round((*hint)[j]);
      if (v < p.lower[j] - kIntTol || v > p.upper[j] + kIntTol) {
        in_bounds = false;
        break;
      }
      hlo[j] = hhi[j] = std::clamp(v, p.lower[j], p.upper[j]);
    }
    if (in_bounds) {
      const auto rep = detail::solve_lp_bounded(p, hlo, hhi);
      if (rep.status == SolveStatus::Optimal) {
        have_inc = true;
        inc_x = rep.x;
        inc_obj = rep.objective_value;
      }
    }
  }

  struct Node {
    double bound;
    long seq;
    std::vector<std::pair<int, double>> fixings;
  };
  auto worse = [](const Node& a, const Node& b) {
    return a.bound > b.bound || (a.bound == b.bound && a.seq > b.seq);
  };
  std::priority_queue<Node, std::vector<Node>, decltype(worse)> open(worse);
  long seq = 0;
  bool exhausted = true;

  std::vector<Node> dive;
  dive.push_back(Node{-kInf, seq++, {}});
  open.push(dive.back());
  dive.clear();

  auto frac_of = [&](const std::vector<double>& x, int j) { return x[j] - std::floor(x[j]); };

  // One simplex instance persists across the tree; nodes re-solve via bound
  // flips plus dual pivots and fall back to a cold solve when that stalls.
  detail::Simplex warm(p, lo, hi);
  bool warm_ready = false;
  struct NodeSolution {
    SolveStatus status;
    double objective = 0.0;
    std::vector<double> x;
  };
  auto node_solve = [&](std::span<const double> nlo,
                        std::span<const double> nhi) -> NodeSolution {
    if (warm_ready) {
      const SolveStatus st = warm.warm_bound_solve(nlo, nhi);
      if (st == SolveStatus::Optimal) {
        return {st, warm.objective_value(), warm.structural_x()};
      }
      if (st == SolveStatus::Infeasible) return {st, 0.0, {}};
    }
    detail::Simplex fresh(p, nlo, nhi);
    SolveStatus st;
    try {
      st = fresh.solve();
    } catch (const std::runtime_error&) {
      return {SolveStatus::Stalled, 0.0, {}};
    }
    warm = std::move(fresh);
    warm_ready = true;
    if (st == SolveStatus::Optimal) return {st, warm.objective_value(), warm.structural_x()};
    return {st, 0.0, {}};
  };

  while (true) {
    Node node;
    if (!dive.empty()) {
      node = std::move(dive.back());
      dive.pop_back();
    } else if (!open.empty()) {
      node = open.top();
      open.pop();
    } else {
      break;
    }
    if (have_inc && node.bound >= inc_obj - kGapTol) continue;
    if (out.nodes_explored >= limits.max_nodes) {
      out.status = SolveStatus::NodeLimit;
      exhausted = false;
      break;
    }
    if (elapsed() > limits.max_seconds) {
      out.status = SolveStatus::Stalled;
      exhausted = false;
      break;
    }

    std::vector<double> nlo = lo, nhi = hi;
    for (const auto& [j, v] : node.fixings) nlo[j] = nhi[j] = v;
    const NodeSolution rel = node_solve(nlo, nhi);
    ++out.nodes_explored;
    if (rel.status == SolveStatus::Infeasible) continue;
    if (rel.status == SolveStatus::Unbounded) {
      out.status = SolveStatus::Unbounded;
      out.solve_time_seconds = elapsed();
      return out;
    }
    if (rel.status != SolveStatus::Optimal) {
      out.status = SolveStatus::Stalled;
      exhausted = false;
      break;
    }
    if (have_inc && rel.objective >= inc_obj - kGapTol) continue;

    int branch = -1;
    double best_dist = 0.5;
    for (int j : bin_cols) {
      const double f = frac_of(rel.x, j);
      const double dist_int = std::min(f, 1.0 - f);
      if (dist_int <= kIntTol) continue;
      const double dist_half = std::abs(f - 0.5);
      if (branch < 0 || dist_half < best_dist - 1e-15) {
        branch = j;
        best_dist = dist_half;
      }
    }
    if (branch < 0) {
      // Integral relaxation: candidate incumbent.
      if (!have_inc || rel.objective < inc_obj) {
        have_inc = true;
        inc_obj = rel.objective;
        inc_x = rel.x;
        for (int j : bin_cols) inc_x[j] = std::round(inc_x[j]);
      }
      continue;
    }

    const double near = std::round(rel.x[branch]);
    const double far = 1.0 - near;
    Node near_child{rel.objective, seq++, node.fixings};
    near_child.fixings.push_back({branch, near});
    Node far_child{rel.objective, seq++, node.fixings};
    far_child.fixings.push_back({branch, far});
    open.push(std::move(far_child));
    dive.push_back(std::move(near_child));
  }

  out.solve_time_seconds = elapsed();
  if (exhausted) {
    if (have_inc) {
      out.status = SolveStatus::Optimal;
      out.x = std::move(inc_x);
      out.objective_value = inc_obj;
    } else {
      out.status = SolveStatus::Infeasible;
    }
  } else if (have_inc) {
    out.x = std::move(inc_x);
    out.objective_value = inc_obj;
  }
  return out;
}

// Plain-text dump in an LP-format-like syntax for cross-checking against
// external solvers.
inline std::string to_lp_format(const MilpProblem& p) {
  std::ostringstream os;
  os.precision(17);
  os << "minimize\n obj:";
  for (int j = 0; j < p.num_vars; ++j) {
    if (p.objective[j] == 0.0) continue;
    os << (p.objective[j] >= 0 ? " + " : " - ") << std::abs(p.objective[j]) << " x" << j;
  }
  os << "\nsubject to\n";
  for (std::size_t i = 0; i < p.constraints.size(); ++i) {
    const auto& c = p.constraints[i];
    os << " c" << i << ":";
    for (const auto& [j, a] : c.terms) {
      os << (a >= 0 ? " + " : " - ") << std::abs(a) << " x" << j;
    }
    os << (c.rel == Relation::LessEq ? " <= " : c.rel == Relation::Equal ? " = " : " >= ")
       << c.rhs << "\n";
  }
  os << "bounds\n";
  for (int j = 0; j < p.num_vars; ++j) {
    if (p.lower[j] <= -kInf) {
      os << " -inf";
    } else {
      os << " " << p.lower[j];
    }
    os << " <= x" << j << " <= ";
    if (p.upper[j] >= kInf) {
      os << "+inf\n";
    } else {
      os << p.upper[j] << "\n";
    }
  }
  os << "binary\n";
  for (int j = 0; j < p.num_vars; ++j) {
    if (p.binary[j]) os << " x" << j;
  }
  os << "\nend\n";
  return os.str();
}

}  // namespace homeres::milp
