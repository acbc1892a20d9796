#pragma once

// Dense bounded-variable primal simplex, two phases, Bland's rule.
// Built for many small problems solved deterministically; no scaling,
// no factorization, just a maintained tableau.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gms {

class LpError : public std::runtime_error {
 public:
  explicit LpError(const std::string& what) : std::runtime_error(what) {}
};

struct LpProblem {
  // relation of a row to its rhs
  enum class Rel { Eq, Le, Ge };
  struct Row {
    std::vector<std::pair<int, double>> terms;
    double rhs = 0.0;
    Rel rel = Rel::Eq;
  };

  std::vector<double> cost, lower, upper;
  std::vector<Row> rows;

  int add_var(double lo, double hi, double c = 0.0) {
    lower.push_back(lo);
    upper.push_back(hi);
    cost.push_back(c);
    return static_cast<int>(cost.size()) - 1;
  }
  void add_row(Rel rel, double rhs, std::vector<std::pair<int, double>> terms) {
    rows.push_back({std::move(terms), rhs, rel});
  }
  int num_vars() const { return static_cast<int>(cost.size()); }
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  double objective = 0.0;
  std::vector<double> x;
  int iterations = 0;
};

struct LpOptions {
  double pivot_tol = 1e-9;
  double feas_tol = 1e-6;
  int max_iterations = 20000;
  // Optional: variable to make basic in each row (callers with a known
  // feasible basis skip phase one). Ignored if it does not work out.
  std::vector<int> basis_hint;
};

namespace lpdetail {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarState : uint8_t { Basic, AtLower, AtUpper, AtZero };

struct Tableau {
  int m = 0, n = 0;                  // rows, total columns (no rhs)
  std::vector<double> a;             // m x (n+1), row-major, last col = rhs
  std::vector<int> basis;            // var basic in each row
  std::vector<VarState> state;       // per var
  std::vector<double> lo, hi, cost;  // per var

  double& at(int i, int j) { return a[static_cast<size_t>(i) * (n + 1) + j]; }
  double at(int i, int j) const { return a[static_cast<size_t>(i) * (n + 1) + j]; }
  double& rhs(int i) { return a[static_cast<size_t>(i) * (n + 1) + n]; }
  double rhs(int i) const { return a[static_cast<size_t>(i) * (n + 1) + n]; }

  double nb_value(int j) const {
    switch (state[j]) {
      case VarState::AtLower: return lo[j];
      case VarState::AtUpper: return hi[j];
      default: return 0.0;
    }
  }

  // Values of the basic variables under the current nonbasic assignment.
  void basic_values(std::vector<double>& xb) const {
    xb.assign(static_cast<size_t>(m), 0.0);
    for (int i = 0; i < m; ++i) xb[i] = rhs(i);
    for (int j = 0; j < n; ++j) {
      if (state[j] == VarState::Basic) continue;
      double v = nb_value(j);
      if (v == 0.0) continue;
      for (int i = 0; i < m; ++i) xb[i] -= at(i, j) * v;
    }
  }

  void pivot(int row, int col, double tol) {
    double p = at(row, col);
    if (std::fabs(p) <= tol) throw LpError("pivot element underflow");
    double inv = 1.0 / p;
    for (int j = 0; j <= n; ++j) at(row, j) *= inv;
    at(row, col) = 1.0;
    for (int i = 0; i < m; ++i) {
      if (i == row) continue;
      double f = at(i, col);
      if (f == 0.0) continue;
      for (int j = 0; j <= n; ++j) at(i, j) -= f * at(row, j);
      at(i, col) = 0.0;
    }
  }
};

// One phase of bounded simplex: minimize `obj` (size n) from the current
// basis. Returns false if unbounded.
inline bool run_simplex(Tableau& t, const std::vector<double>& obj, const LpOptions& opt,
                        int& iters) {
  std::vector<double> xb;
  const int max_it = opt.max_iterations;
  while (true) {
    if (++iters > max_it) throw LpError("simplex iteration limit reached");

    // reduced costs d_j = c_j - c_B . column_j ; Bland: smallest improving index
    std::vector<double> cb(static_cast<size_t>(t.m));
    for (int i = 0; i < t.m; ++i) cb[i] = obj[t.basis[i]];
    int enter = -1;
    int dir = 0;  // +1 raise, -1 drop
    for (int j = 0; j < t.n && enter < 0; ++j) {
      if (t.state[j] == VarState::Basic) continue;
      double d = obj[j];
      for (int i = 0; i < t.m; ++i)
        if (cb[i] != 0.0) d -= cb[i] * t.at(i, j);
      if ((t.state[j] == VarState::AtLower || t.state[j] == VarState::AtZero) &&
          d < -opt.pivot_tol) {
        enter = j;
        dir = +1;
      } else if ((t.state[j] == VarState::AtUpper || t.state[j] == VarState::AtZero) &&
                 d > opt.pivot_tol) {
        enter = j;
        dir = -1;
      }
    }
    if (enter < 0) return true;  // optimal

    t.basic_values(xb);

    // ratio test: largest step for the entering variable
    double limit = kInf;
    int leave_row = -1;
    bool leave_at_upper = false;
    if (dir > 0 && std::isfinite(t.hi[enter]) && std::isfinite(t.lo[enter]))
      limit = t.hi[enter] - t.nb_value(enter);
    else if (dir < 0 && std::isfinite(t.lo[enter]) && std::isfinite(t.hi[enter]))
      limit = t.nb_value(enter) - t.lo[enter];

    for (int i = 0; i < t.m; ++i) {
      double alpha = t.at(i, enter) * dir;  // basic var moves at rate -alpha
      int bv = t.basis[i];
      double step = kInf;
      bool to_upper = false;
      if (alpha > opt.pivot_tol) {
        if (std::isfinite(t.lo[bv])) step = (xb[i] - t.lo[bv]) / alpha;
      } else if (alpha < -opt.pivot_tol) {
        if (std::isfinite(t.hi[bv])) {
          step = (t.hi[bv] - xb[i]) / (-alpha);
          to_upper = true;
        }
      }
      if (step < -1e-12) step = 0.0;
      if (step < limit - 1e-15) {
        limit = step;
        leave_row = i;
        leave_at_upper = to_upper;
      } else if (leave_row >= 0 && step <= limit + 1e-15) {
        // Bland tie-break on the leaving variable index
        if (t.basis[i] < t.basis[leave_row]) {
          leave_row = i;
          leave_at_upper = to_upper;
        }
      }
    }

    if (!std::isfinite(limit)) return false;  // unbounded direction

    if (leave_row < 0) {
      // entering variable runs bound to bound
      t.state[enter] =
          (dir > 0) ? VarState::AtUpper : VarState::AtLower;
      continue;
    }

    int leaving = t.basis[leave_row];
    t.pivot(leave_row, enter, opt.pivot_tol);
    t.basis[leave_row] = enter;
    t.state[enter] = VarState::Basic;
    if (t.lo[leaving] == t.hi[leaving])
      t.state[leaving] = VarState::AtLower;
    else
      t.state[leaving] = leave_at_upper ? VarState::AtUpper : VarState::AtLower;
  }
}

}  // namespace lpdetail

inline LpResult solve_lp(const LpProblem& p, const LpOptions& opt = {}) {
  using namespace lpdetail;
  const int n0 = p.num_vars();
  const int m = static_cast<int>(p.rows.size());

  for (int j = 0; j < n0; ++j)
    if (p.lower[j] > p.upper[j] + opt.feas_tol) return {LpStatus::Infeasible, 0.0, {}, 0};

  Tableau t;
  t.m = m;
  t.lo = p.lower;
  t.hi = p.upper;
  t.cost = p.cost;

  // slacks for inequalities
  std::vector<int> slack_of(static_cast<size_t>(m), -1);
  for (int i = 0; i < m; ++i) {
    if (p.rows[i].rel == LpProblem::Rel::Eq) continue;
    t.lo.push_back(0.0);
    t.hi.push_back(kInf);
    t.cost.push_back(0.0);
    slack_of[i] = static_cast<int>(t.cost.size()) - 1;
  }
  const int n_slacked = static_cast<int>(t.cost.size());

  // artificials on every row (phase one may skip them given a basis hint)
  std::vector<int> art_of(static_cast<size_t>(m));
  for (int i = 0; i < m; ++i) {
    t.lo.push_back(0.0);
    t.hi.push_back(kInf);
    t.cost.push_back(0.0);
    art_of[i] = n_slacked + i;
  }
  t.n = static_cast<int>(t.cost.size());

  t.a.assign(static_cast<size_t>(m) * (t.n + 1), 0.0);
  for (int i = 0; i < m; ++i) {
    for (const auto& [j, v] : p.rows[i].terms) {
      if (j < 0 || j >= n0) throw LpError("row references unknown variable");
      t.at(i, j) += v;
    }
    double rhs = p.rows[i].rhs;
    if (slack_of[i] >= 0)
      t.at(i, slack_of[i]) = (p.rows[i].rel == LpProblem::Rel::Le) ? 1.0 : -1.0;
    t.rhs(i) = rhs;
  }

  // nonbasic start: finite bound nearest zero, free vars at zero
  t.state.assign(static_cast<size_t>(t.n), VarState::AtLower);
  for (int j = 0; j < t.n; ++j) {
    bool lo_f = std::isfinite(t.lo[j]), hi_f = std::isfinite(t.hi[j]);
    if (lo_f && hi_f)
      t.state[j] = (std::fabs(t.lo[j]) <= std::fabs(t.hi[j])) ? VarState::AtLower
                                                              : VarState::AtUpper;
    else if (lo_f)
      t.state[j] = VarState::AtLower;
    else if (hi_f)
      t.state[j] = VarState::AtUpper;
    else
      t.state[j] = VarState::AtZero;
  }

  int iters = 0;
  bool phase1_needed = true;

  // try the caller's basis first
  if (static_cast<int>(opt.basis_hint.size()) == m && m > 0) {
    bool ok = true;
    t.basis.assign(static_cast<size_t>(m), -1);
    for (int i = 0; i < m && ok; ++i) {
      int j = opt.basis_hint[i];
      if (j < 0 || j >= n_slacked || t.state[j] == VarState::Basic) {
        ok = false;
        break;
      }
      // find the row (>= i) where this column still has weight
      int r = -1;
      for (int k = i; k < m; ++k)
        if (t.basis[k] == -1 && std::fabs(t.at(k, j)) > 1e-7) {
          r = k;
          break;
        }
      if (r < 0) {
        ok = false;
        break;
      }
      if (r != i)
        for (int c = 0; c <= t.n; ++c) std::swap(t.at(r, c), t.at(i, c));
      t.pivot(i, j, opt.pivot_tol);
      t.basis[i] = j;
      t.state[j] = VarState::Basic;
    }
    if (ok) {
      std::vector<double> xb;
      t.basic_values(xb);
      bool feas = true;
      for (int i = 0; i < m; ++i)
        if (xb[i] < t.lo[t.basis[i]] - opt.feas_tol ||
            xb[i] > t.hi[t.basis[i]] + opt.feas_tol)
          feas = false;
      if (feas) phase1_needed = false;
    }
    if (phase1_needed) {
      // rebuild the tableau untouched
      for (int j = 0; j < t.n; ++j)
        if (t.state[j] == VarState::Basic) t.state[j] = VarState::AtLower;
      t.a.assign(static_cast<size_t>(m) * (t.n + 1), 0.0);
      for (int i = 0; i < m; ++i) {
        for (const auto& [j, v] : p.rows[i].terms) t.at(i, j) += v;
        if (slack_of[i] >= 0)
          t.at(i, slack_of[i]) = (p.rows[i].rel == LpProblem::Rel::Le) ? 1.0 : -1.0;
        t.rhs(i) = p.rows[i].rhs;
      }
      for (int j = 0; j < t.n; ++j) {
        bool lo_f = std::isfinite(t.lo[j]), hi_f = std::isfinite(t.hi[j]);
        if (lo_f && hi_f)
          t.state[j] = (std::fabs(t.lo[j]) <= std::fabs(t.hi[j])) ? VarState::AtLower
                                                                  : VarState::AtUpper;
        else if (lo_f)
          t.state[j] = VarState::AtLower;
        else if (hi_f)
          t.state[j] = VarState::AtUpper;
        else
          t.state[j] = VarState::AtZero;
      }
    }
  }

  if (phase1_needed) {
    // orient rows so the artificial basis starts feasible
    std::vector<double> resid(static_cast<size_t>(m), 0.0);
    for (int i = 0; i < m; ++i) {
      double r = t.rhs(i);
      for (int j = 0; j < n_slacked; ++j) {
        double v = t.nb_value(j);
        if (v != 0.0) r -= t.at(i, j) * v;
      }
      resid[i] = r;
    }
    t.basis.assign(static_cast<size_t>(m), -1);
    for (int i = 0; i < m; ++i) {
      if (resid[i] < 0.0)
        for (int c = 0; c <= t.n; ++c)
          if (t.at(i, c) != 0.0 || c == t.n) t.at(i, c) = -t.at(i, c);
      t.at(i, art_of[i]) = 1.0;
      t.basis[i] = art_of[i];
      t.state[art_of[i]] = VarState::Basic;
    }

    std::vector<double> phase1_obj(static_cast<size_t>(t.n), 0.0);
    for (int i = 0; i < m; ++i) phase1_obj[art_of[i]] = 1.0;
    if (!run_simplex(t, phase1_obj, opt, iters))
      throw LpError("phase-one unbounded, inconsistent tableau");

    std::vector<double> xb;
    t.basic_values(xb);
    double infeas = 0.0;
    for (int i = 0; i < m; ++i)
      if (t.basis[i] >= n_slacked) infeas += xb[i];
    if (infeas > opt.feas_tol) return {LpStatus::Infeasible, 0.0, {}, iters};

    // pin artificials to zero so phase two cannot revive them
    for (int i = 0; i < m; ++i) {
      t.lo[art_of[i]] = 0.0;
      t.hi[art_of[i]] = 0.0;
      if (t.state[art_of[i]] != VarState::Basic) t.state[art_of[i]] = VarState::AtLower;
    }
  } else {
    // hint accepted; artificials never enter (zero bounds, nonbasic)
    for (int i = 0; i < m; ++i) {
      t.lo[art_of[i]] = 0.0;
      t.hi[art_of[i]] = 0.0;
      if (t.state[art_of[i]] != VarState::Basic) t.state[art_of[i]] = VarState::AtLower;
    }
  }

  std::vector<double> phase2_obj(static_cast<size_t>(t.n), 0.0);
  for (int j = 0; j < n0; ++j) phase2_obj[j] = p.cost[j];
  if (!run_simplex(t, phase2_obj, opt, iters)) {
    LpResult r;
    r.status = LpStatus::Unbounded;
    r.iterations = iters;
    return r;
  }

  std::vector<double> xb;
  t.basic_values(xb);
  LpResult res;
  res.status = LpStatus::Optimal;
  res.iterations = iters;
  res.x.assign(static_cast<size_t>(n0), 0.0);
  for (int j = 0; j < n0; ++j)
    if (t.state[j] != VarState::Basic) res.x[j] = t.nb_value(j);
  for (int i = 0; i < m; ++i)
    if (t.basis[i] < n0) res.x[t.basis[i]] = xb[i];
  for (int j = 0; j < n0; ++j) {
    if (!std::isfinite(res.x[j])) throw LpError("non-finite solution component");
    res.objective += p.cost[j] * res.x[j];
  }
  return res;
}

}  // namespace gms
