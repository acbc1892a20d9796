#pragma once

// Grid-side acceptance of maintenance requests. Each day the operator picks
// the subset of requesting units that maximizes summed urgency weight while
// the remaining fleet can still serve the load over the DC network. Days
// decouple, so per-day subset enumeration with a flow feasibility check is
// exact.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "gms/domain.hpp"
#include "gms/lp.hpp"
#include "gms/scenarios.hpp"

namespace gms {

// Whether a request block must be taken or refused whole, or day by day.
enum class AcceptanceMode { BlockAtomic, PerTimestep };

struct TsoOptions {
  double eps = 0.5;        // softening in the urgency denominator
  AcceptanceMode mode = AcceptanceMode::BlockAtomic;
  double feas_tol = 1e-6;  // MW tolerance on balance residuals
  int max_requesters = 12; // subset-enumeration guard per day
};

// Urgency of taking the unit down at day t under one event's scenarios:
// closer predicted failures weigh more, already-passed ones weigh nothing.
inline double acceptance_weight(const ScenarioSet& set, int t, double eps = 0.5) {
  double w = 0.0;
  for (const auto& sc : set.items) {
    const double den = static_cast<double>(sc.fail_time - t) + eps;
    if (den > 0.0) w += sc.prob / den;
  }
  return w;
}

inline std::vector<double> agent_day_weights(const std::vector<ScenarioSet>& scens,
                                             const TimeGrid& grid, double eps = 0.5) {
  std::vector<double> w(static_cast<size_t>(grid.horizon_length), 0.0);
  for (int t = 1; t <= grid.horizon_length; ++t)
    for (const auto& set : scens)
      w[static_cast<size_t>(t - 1)] += acceptance_weight(set, t, eps);
  return w;
}

// Scale of the linearization envelope for the fulfilled-injection product
// (1 - y) * q: no injection can exceed the largest nameplate.
inline double big_m_value(const std::vector<AgentProfile>& agents) {
  double m = 0.0;
  for (const auto& a : agents) m = std::max(m, a.q_max);
  return m;
}

// One day's dispatch under a fixed outage set.
struct DispatchDay {
  bool feasible = false;
  std::vector<double> q;      // MW per unit, agents order
  std::vector<uint8_t> u;     // commitment per unit
  std::vector<double> theta;  // rad per bus, NetworkModel order
  std::vector<double> flow;   // MW per line
};

struct TsoCache {
  std::unordered_map<uint64_t, DispatchDay> map;
};

namespace tsodetail {

inline uint64_t day_mask_key(int day, uint32_t out_mask) {
  return (static_cast<uint64_t>(day) << 32) | out_mask;
}

struct DispatchSolver {
  const NetworkModel& net;
  const std::vector<AgentProfile>& agents;
  int day;
  double tol;

  // decided[i]: -1 open, 0 forced off, 1 committed (only q_min > 0 units
  // ever branch; everything else dispatches freely in [0, q_max])
  DispatchDay attempt(uint32_t out_mask, std::vector<int8_t>& decided) const {
    const int n_units = static_cast<int>(agents.size());
    const int n_bus = static_cast<int>(net.buses.size());
    const int n_line = static_cast<int>(net.lines.size());

    LpProblem lp;
    std::vector<int> qv(static_cast<size_t>(n_units));
    for (int i = 0; i < n_units; ++i) {
      const bool out = (out_mask >> i) & 1u;
      double lo = 0.0, hi = 0.0;
      if (!out) {
        if (decided[static_cast<size_t>(i)] == 0)
          hi = 0.0;
        else if (decided[static_cast<size_t>(i)] == 1)
          lo = agents[static_cast<size_t>(i)].q_min, hi = agents[static_cast<size_t>(i)].q_max;
        else
          hi = agents[static_cast<size_t>(i)].q_max;
      }
      qv[static_cast<size_t>(i)] = lp.add_var(lo, hi, 0.0);
    }
    std::vector<int> fv(static_cast<size_t>(n_line));
    for (int e = 0; e < n_line; ++e)
      fv[static_cast<size_t>(e)] =
          lp.add_var(-net.lines[static_cast<size_t>(e)].capacity,
                     net.lines[static_cast<size_t>(e)].capacity, 0.0);
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<int> thv(static_cast<size_t>(n_bus));
    for (int b = 0; b < n_bus; ++b)
      thv[static_cast<size_t>(b)] = lp.add_var(b == 0 ? 0.0 : -inf, b == 0 ? 0.0 : inf, 0.0);
    std::vector<int> sp(static_cast<size_t>(n_bus)), sm(static_cast<size_t>(n_bus));
    for (int b = 0; b < n_bus; ++b) {
      sp[static_cast<size_t>(b)] = lp.add_var(0.0, inf, 1.0);
      sm[static_cast<size_t>(b)] = lp.add_var(0.0, inf, 1.0);
    }

    LpOptions opt;
    opt.feas_tol = tol;

    // bus balance rows, then flow definition rows
    for (int b = 0; b < n_bus; ++b) {
      const int bus_id = net.buses[static_cast<size_t>(b)];
      std::vector<std::pair<int, double>> terms;
      for (int i = 0; i < n_units; ++i)
        if (agents[static_cast<size_t>(i)].bus == bus_id)
          terms.push_back({qv[static_cast<size_t>(i)], 1.0});
      for (int e = 0; e < n_line; ++e) {
        if (net.lines[static_cast<size_t>(e)].to == bus_id)
          terms.push_back({fv[static_cast<size_t>(e)], 1.0});
        if (net.lines[static_cast<size_t>(e)].from == bus_id)
          terms.push_back({fv[static_cast<size_t>(e)], -1.0});
      }
      terms.push_back({sp[static_cast<size_t>(b)], 1.0});
      terms.push_back({sm[static_cast<size_t>(b)], -1.0});
      lp.add_row(LpProblem::Rel::Eq, net.load_at(bus_id, day), std::move(terms));
      opt.basis_hint.push_back(sp[static_cast<size_t>(b)]);
    }
    for (int e = 0; e < n_line; ++e) {
      const auto& ln = net.lines[static_cast<size_t>(e)];
      const double k = net.mva_base * ln.susceptance;
      lp.add_row(LpProblem::Rel::Eq, 0.0,
                 {{fv[static_cast<size_t>(e)], 1.0},
                  {thv[static_cast<size_t>(net.bus_index(ln.from))], -k},
                  {thv[static_cast<size_t>(net.bus_index(ln.to))], k}});
      opt.basis_hint.push_back(fv[static_cast<size_t>(e)]);
    }

    auto sol = solve_lp(lp, opt);
    if (sol.status != LpStatus::Optimal)
      throw LpError("slack-relaxed dispatch must stay solvable");

    DispatchDay d;
    if (sol.objective > tol) return d;  // cannot balance: infeasible branch
    d.feasible = true;
    d.q.resize(static_cast<size_t>(n_units));
    d.u.resize(static_cast<size_t>(n_units));
    for (int i = 0; i < n_units; ++i) {
      const bool out = (out_mask >> i) & 1u;
      d.q[static_cast<size_t>(i)] = out ? 0.0 : sol.x[static_cast<size_t>(qv[static_cast<size_t>(i)])];
      d.u[static_cast<size_t>(i)] =
          (!out && decided[static_cast<size_t>(i)] != 0) ? 1 : 0;
    }
    d.theta.resize(static_cast<size_t>(n_bus));
    for (int b = 0; b < n_bus; ++b)
      d.theta[static_cast<size_t>(b)] = sol.x[static_cast<size_t>(thv[static_cast<size_t>(b)])];
    d.flow.resize(static_cast<size_t>(n_line));
    for (int e = 0; e < n_line; ++e)
      d.flow[static_cast<size_t>(e)] = sol.x[static_cast<size_t>(fv[static_cast<size_t>(e)])];
    return d;
  }

  DispatchDay branch(uint32_t out_mask, std::vector<int8_t>& decided) const {
    DispatchDay relaxed = attempt(out_mask, decided);
    if (!relaxed.feasible) return relaxed;  // box relaxation already fails
    int open = -1;
    for (size_t i = 0; i < agents.size(); ++i)
      if (decided[i] == -1 && !((out_mask >> i) & 1u) && agents[i].q_min > 0.0) {
        open = static_cast<int>(i);
        break;
      }
    if (open < 0) return relaxed;  // no minimum-output unit left open
    decided[static_cast<size_t>(open)] = 1;
    DispatchDay on = branch(out_mask, decided);
    if (on.feasible) {
      decided[static_cast<size_t>(open)] = -1;
      return on;
    }
    decided[static_cast<size_t>(open)] = 0;
    DispatchDay off = branch(out_mask, decided);
    decided[static_cast<size_t>(open)] = -1;
    return off;
  }

  DispatchDay solve(uint32_t out_mask) const {
    std::vector<int8_t> decided(agents.size(), -1);
    return branch(out_mask, decided);
  }
};

inline const DispatchDay& dispatch_for(const NetworkModel& net,
                                       const std::vector<AgentProfile>& agents, int day,
                                       uint32_t out_mask, double tol, TsoCache& cache) {
  const uint64_t key = day_mask_key(day, out_mask);
  auto it = cache.map.find(key);
  if (it != cache.map.end()) return it->second;
  DispatchSolver solver{net, agents, day, tol};
  return cache.map.emplace(key, solver.solve(out_mask)).first->second;
}

}  // namespace tsodetail

// Whether the fleet without the masked units can serve day t.
inline bool dcopf_feasible(const NetworkModel& net, const std::vector<AgentProfile>& agents,
                           const std::vector<uint8_t>& out, int day, double tol = 1e-6) {
  detail::require(out.size() == agents.size(), "outage mask length != unit count");
  detail::require(agents.size() <= 32, "dispatch supports at most 32 units");
  uint32_t mask = 0;
  for (size_t i = 0; i < out.size(); ++i)
    if (out[i]) mask |= (1u << i);
  tsodetail::DispatchSolver solver{net, agents, day, tol};
  return solver.solve(mask).feasible;
}

struct TsoResult {
  ScheduleMatrix schedule;              // x copied, y/u/q/z/theta filled
  std::vector<std::vector<double>> flow;  // [line][day] MW
  int days_with_requests = 0;
  int days_with_rejections = 0;
};

// Decide acceptance for the whole horizon given the agents' request lattice.
// Requests carry weight summed over the requesting unit's fault scenarios;
// every day the operator keeps the heaviest feasible subset (ties: more
// units, then lowest ids). In block-atomic mode a block losing any day is
// withdrawn entirely.
inline TsoResult solve_tso(const std::vector<AgentProfile>& agents,
                           const std::vector<std::vector<ScenarioSet>>& scens,
                           const std::vector<std::vector<uint8_t>>& x,
                           const NetworkModel& net, const TimeGrid& grid,
                           const TsoOptions& opts = {}, TsoCache* cache = nullptr) {
  const int n = static_cast<int>(agents.size());
  const int horizon = grid.horizon_length;
  detail::require(n >= 1, "no agents");
  detail::require(n <= 32, "dispatch supports at most 32 units");
  detail::require(static_cast<int>(scens.size()) == n, "scenario sets must match agents");
  detail::require(static_cast<int>(x.size()) == n, "request lattice must match agents");
  for (const auto& row : x)
    detail::require(static_cast<int>(row.size()) == horizon, "request row length != horizon");

  TsoCache local;
  TsoCache& mem = cache ? *cache : local;

  std::vector<std::vector<double>> weight(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    weight[static_cast<size_t>(i)] = agent_day_weights(scens[static_cast<size_t>(i)], grid, opts.eps);

  TsoResult out;
  out.schedule.x = x;
  out.schedule.y.assign(static_cast<size_t>(n), std::vector<uint8_t>(static_cast<size_t>(horizon), 0));

  // day-by-day acceptance
  for (int t = 1; t <= horizon; ++t) {
    std::vector<int> req;  // agent indices, ascending id
    for (int i = 0; i < n; ++i)
      if (x[static_cast<size_t>(i)][static_cast<size_t>(t - 1)]) req.push_back(i);
    std::sort(req.begin(), req.end(),
              [&](int a, int b) { return agents[static_cast<size_t>(a)].id < agents[static_cast<size_t>(b)].id; });
    if (req.empty()) continue;
    out.days_with_requests++;
    detail::require(static_cast<int>(req.size()) <= opts.max_requesters,
                    "day " + std::to_string(t) + ": too many simultaneous requests");

    const auto& base = tsodetail::dispatch_for(net, agents, t, 0u, opts.feas_tol, mem);
    if (!base.feasible)
      throw ValidationError("day " + std::to_string(t) +
                            ": load cannot be served even with every unit available");

    const int k = static_cast<int>(req.size());
    double best_w = 0.0;
    int best_cnt = 0;
    std::vector<int> best_ids;  // empty set is always a feasible fallback
    uint32_t best_mask = 0;
    for (uint32_t s = 1; s < (1u << k); ++s) {
      uint32_t mask = 0;
      double w = 0.0;
      int cnt = 0;
      std::vector<int> ids;
      for (int j = 0; j < k; ++j)
        if ((s >> j) & 1u) {
          const int idx = req[static_cast<size_t>(j)];
          mask |= (1u << idx);
          w += weight[static_cast<size_t>(idx)][static_cast<size_t>(t - 1)];
          cnt++;
          ids.push_back(agents[static_cast<size_t>(idx)].id);
        }
      if (!tsodetail::dispatch_for(net, agents, t, mask, opts.feas_tol, mem).feasible) continue;
      const bool better = (w > best_w) || (w == best_w && cnt > best_cnt) ||
                          (w == best_w && cnt == best_cnt && !best_ids.empty() && ids < best_ids);
      if (better) {
        best_w = w;
        best_cnt = cnt;
        best_ids = ids;
        best_mask = mask;
      }
    }
    for (int i = 0; i < n; ++i)
      if ((best_mask >> i) & 1u) out.schedule.y[static_cast<size_t>(i)][static_cast<size_t>(t - 1)] = 1;
    if (best_cnt < k) out.days_with_rejections++;
  }

  // a partially refused block is withdrawn whole
  if (opts.mode == AcceptanceMode::BlockAtomic) {
    for (int i = 0; i < n; ++i) {
      auto& xi = out.schedule.x[static_cast<size_t>(i)];
      auto& yi = out.schedule.y[static_cast<size_t>(i)];
      int t = 0;
      while (t < horizon) {
        if (!xi[static_cast<size_t>(t)]) {
          ++t;
          continue;
        }
        int end = t;
        while (end + 1 < horizon && xi[static_cast<size_t>(end + 1)]) ++end;
        bool whole = true;
        for (int s = t; s <= end; ++s)
          if (!yi[static_cast<size_t>(s)]) whole = false;
        if (!whole)
          for (int s = t; s <= end; ++s) yi[static_cast<size_t>(s)] = 0;
        t = end + 1;
      }
    }
  }

  // final dispatch under the settled outages
  out.schedule.u.assign(static_cast<size_t>(n), std::vector<uint8_t>(static_cast<size_t>(horizon), 0));
  out.schedule.q.assign(static_cast<size_t>(n), std::vector<double>(static_cast<size_t>(horizon), 0.0));
  out.schedule.z.assign(static_cast<size_t>(n), std::vector<double>(static_cast<size_t>(horizon), 0.0));
  out.schedule.theta.assign(net.buses.size(), std::vector<double>(static_cast<size_t>(horizon), 0.0));
  out.flow.assign(net.lines.size(), std::vector<double>(static_cast<size_t>(horizon), 0.0));
  for (int t = 1; t <= horizon; ++t) {
    uint32_t mask = 0;
    for (int i = 0; i < n; ++i)
      if (out.schedule.y[static_cast<size_t>(i)][static_cast<size_t>(t - 1)]) mask |= (1u << i);
    const auto& d = tsodetail::dispatch_for(net, agents, t, mask, opts.feas_tol, mem);
    if (!d.feasible)
      throw ValidationError("day " + std::to_string(t) +
                            (mask == 0 ? ": load cannot be served even with every unit available"
                                       : ": settled outage set lost feasibility"));
    for (int i = 0; i < n; ++i) {
      out.schedule.u[static_cast<size_t>(i)][static_cast<size_t>(t - 1)] = d.u[static_cast<size_t>(i)];
      out.schedule.q[static_cast<size_t>(i)][static_cast<size_t>(t - 1)] = d.q[static_cast<size_t>(i)];
      const double y = out.schedule.y[static_cast<size_t>(i)][static_cast<size_t>(t - 1)] ? 1.0 : 0.0;
      out.schedule.z[static_cast<size_t>(i)][static_cast<size_t>(t - 1)] =
          (1.0 - y) * d.q[static_cast<size_t>(i)];
    }
    for (size_t b = 0; b < net.buses.size(); ++b)
      out.schedule.theta[b][static_cast<size_t>(t - 1)] = d.theta[b];
    for (size_t e = 0; e < net.lines.size(); ++e)
      out.flow[e][static_cast<size_t>(t - 1)] = d.flow[e];
  }
  return out;
}

}  // namespace gms
