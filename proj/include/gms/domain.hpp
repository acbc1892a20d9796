#pragma once

// Core model types shared by every layer: the planning grid, unit fault
// events, agent profiles, the transmission network and assembled schedules.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace gms {

// Three-valued sign: -1 below zero, 0 at zero, +1 above.
inline int sign(double v) {
  if (v > 0.0) return 1;
  if (v < 0.0) return -1;
  return 0;
}

class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
  ParseError(const std::string& file, int row, const std::string& what)
      : std::runtime_error(file + ":" + std::to_string(row) + ": " + what),
        file_(file), row_(row) {}
  const std::string& file() const { return file_; }
  int row() const { return row_; }

 private:
  std::string file_;
  int row_ = 0;
};

// Discrete planning horizon. Days are 1-based: t = 1..horizon_length.
struct TimeGrid {
  int horizon_length = 0;

  bool contains(int t) const { return t >= 1 && t <= horizon_length; }
};

// One predicted fault of one unit: detected at detect_time, remaining time
// to failure distributed N(rul_mean, rul_std^2), maintenance schedulable
// inside [window_start, window_end].
struct FaultEvent {
  int detect_time = 0;     // day the degradation is detected (t1)
  double rul_mean = 0.0;   // mean predicted failure day (tau)
  double rul_std = 0.0;    // std of the predicted failure day (sigma)
  int window_start = 0;    // first schedulable day of this event
  int window_end = 0;      // last schedulable day of this event

  int window_length() const { return window_end - window_start + 1; }
};

// Generation agent: one unit, its economics and its predicted fault events.
struct AgentProfile {
  int id = 0;              // unit index, 1-based
  int bus = 0;             // grid bus the unit injects at
  double q_min = 0.0;      // MW, minimum stable output when committed
  double q_max = 0.0;      // MW
  double marginal_cost = 0.0;  // $/MW-day, constant
  int repair_time = 1;     // days, maximum maintenance block length
  double alpha = 0.0;      // $/day scale of the fault progression penalty
  double gamma = 0.0;      // $ per penalized day; used when gamma_auto=false
  bool gamma_auto = true;  // derive gamma from the rejection-penalty bound
  std::vector<FaultEvent> events;  // disjoint, ascending windows

  // Total generation cost of running at q for one day.
  double gen_cost(double q) const { return marginal_cost * q; }
};

struct Line {
  int from = 0;
  int to = 0;
  double susceptance = 0.0;  // per-unit on the MVA base
  double capacity = 0.0;     // MW flow limit, both directions
};

// Transmission grid plus exogenous series (loads, price).
struct NetworkModel {
  std::vector<int> buses;                 // ids, ascending
  std::vector<Line> lines;
  std::map<int, int> unit_bus;            // unit id -> bus id
  std::vector<double> total_load;         // MW per day, size horizon_length
  std::map<int, double> load_share;       // bus id -> participation factor
  std::vector<double> price;              // $/MW per day, size horizon_length
  double mva_base = 100.0;

  int bus_index(int bus_id) const {
    auto it = std::lower_bound(buses.begin(), buses.end(), bus_id);
    if (it == buses.end() || *it != bus_id)
      throw ValidationError("unknown bus id " + std::to_string(bus_id));
    return static_cast<int>(it - buses.begin());
  }

  // Load at a bus on day t (1-based), via the fixed participation factors.
  double load_at(int bus_id, int t) const {
    auto it = load_share.find(bus_id);
    double share = (it == load_share.end()) ? 0.0 : it->second;
    return share * total_load.at(static_cast<size_t>(t - 1));
  }
};

// Full decision lattice for one negotiation iteration. Rows are agents in
// profile order, columns are days 1..T (stored 0-based). theta rows are
// buses in NetworkModel order.
struct ScheduleMatrix {
  std::vector<std::vector<uint8_t>> x;   // requested maintenance
  std::vector<std::vector<uint8_t>> y;   // accepted maintenance
  std::vector<std::vector<uint8_t>> u;   // commitment
  std::vector<std::vector<double>> q;    // MW dispatch
  std::vector<std::vector<double>> z;    // MW fulfilled injection
  std::vector<std::vector<double>> theta;  // rad, bus-major

  int agents() const { return static_cast<int>(x.size()); }
  int days() const { return x.empty() ? 0 : static_cast<int>(x[0].size()); }
};

struct ValidationIssue {
  std::string check;
  bool passed = false;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool assumption_spacing_ok = true;    // failure windows long enough for all fleets' repairs
  bool assumption_adequacy_ok = true;   // any single unit removable at every day
  bool structural_ok = true;

  bool all_ok() const {
    return assumption_spacing_ok && assumption_adequacy_ok && structural_ok;
  }
};

namespace detail {

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw ValidationError(msg);
}

// Connectivity of the bus graph under the given line set.
inline bool connected(const std::vector<int>& buses, const std::vector<Line>& lines) {
  if (buses.empty()) return false;
  std::map<int, std::vector<int>> adj;
  for (const auto& l : lines) {
    adj[l.from].push_back(l.to);
    adj[l.to].push_back(l.from);
  }
  std::set<int> seen{buses.front()};
  std::vector<int> stack{buses.front()};
  while (!stack.empty()) {
    int b = stack.back();
    stack.pop_back();
    for (int nb : adj[b])
      if (seen.insert(nb).second) stack.push_back(nb);
  }
  return seen.size() == buses.size();
}

}  // namespace detail

// Structural checks are hard errors (throw ValidationError). The two
// operating assumptions are soft: reported as flags so a run can proceed
// with a warning.
//
// Spacing is judged against the earliest plausible failure day of each
// event (mean minus four std, floored at the day after detection); callers
// holding sampled failure days can redo the check exactly.
inline ValidationReport validate_inputs(const std::vector<AgentProfile>& agents,
                                        const NetworkModel& net,
                                        const TimeGrid& grid) {
  using detail::require;
  ValidationReport rep;

  require(grid.horizon_length >= 1, "horizon must be at least one day");
  require(!net.buses.empty(), "network has no buses");
  require(std::is_sorted(net.buses.begin(), net.buses.end()) &&
              std::adjacent_find(net.buses.begin(), net.buses.end()) == net.buses.end(),
          "bus ids must be ascending and unique");
  require(net.total_load.size() == static_cast<size_t>(grid.horizon_length),
          "load series length != horizon");
  require(net.price.size() == static_cast<size_t>(grid.horizon_length),
          "price series length != horizon");
  for (double l : net.total_load) require(l >= 0.0, "negative system load");
  require(net.mva_base > 0.0, "MVA base must be positive");

  std::set<int> bus_set(net.buses.begin(), net.buses.end());
  for (const auto& l : net.lines) {
    require(bus_set.count(l.from) && bus_set.count(l.to),
            "line references unknown bus " + std::to_string(l.from) + "-" +
                std::to_string(l.to));
    require(l.from != l.to, "line connects a bus to itself");
    require(l.susceptance > 0.0, "line susceptance must be positive");
    require(l.capacity > 0.0, "line capacity must be positive");
  }
  if (net.buses.size() > 1)
    require(detail::connected(net.buses, net.lines), "bus graph is disconnected");

  for (const auto& [unit, bus] : net.unit_bus)
    require(bus_set.count(bus), "unit " + std::to_string(unit) +
                                    " placed at unknown bus " + std::to_string(bus));
  for (const auto& [bus, share] : net.load_share) {
    require(bus_set.count(bus), "load share at unknown bus " + std::to_string(bus));
    require(share >= 0.0, "negative load share");
  }

  std::set<int> agent_ids;
  int max_repair = 1;
  for (const auto& a : agents) {
    require(agent_ids.insert(a.id).second, "duplicate agent id " + std::to_string(a.id));
    require(net.unit_bus.count(a.id) && net.unit_bus.at(a.id) == a.bus,
            "agent " + std::to_string(a.id) + " bus mismatch with the network map");
    require(a.q_max > 0.0, "agent " + std::to_string(a.id) + " has non-positive q_max");
    require(a.q_min >= 0.0 && a.q_min <= a.q_max,
            "agent " + std::to_string(a.id) + " q_min out of range");
    require(a.repair_time >= 1, "repair time must be at least one day");
    require(a.alpha >= 0.0, "negative fault penalty scale");
    if (!a.gamma_auto)
      require(a.gamma > 0.0, "explicit gamma must be positive");
    max_repair = std::max(max_repair, a.repair_time);

    int prev_end = 0;
    for (const auto& e : a.events) {
      require(e.window_start >= 1 && e.window_end <= grid.horizon_length,
              "agent " + std::to_string(a.id) + " event window outside the grid");
      require(e.window_start > prev_end,
              "agent " + std::to_string(a.id) + " event windows overlap");
      require(e.window_start <= e.detect_time, "window must cover the detection day");
      require(static_cast<double>(e.detect_time) < e.rul_mean,
              "predicted failure must come after detection");
      require(e.rul_mean <= static_cast<double>(e.window_end),
              "window must reach the mean failure day");
      require(e.rul_std >= 0.0, "negative failure-time std");
      prev_end = e.window_end;
    }
  }

  const int n_agents = static_cast<int>(agents.size());

  // Spacing: earliest plausible failure leaves room for every fleet repair.
  double min_margin = std::numeric_limits<double>::infinity();
  for (const auto& a : agents)
    for (const auto& e : a.events) {
      double earliest = std::max(static_cast<double>(e.detect_time + 1),
                                 e.rul_mean - 4.0 * e.rul_std);
      min_margin = std::min(min_margin, earliest - e.detect_time);
    }
  double spacing_need = static_cast<double>(n_agents) * max_repair;
  rep.assumption_spacing_ok =
      !std::isfinite(min_margin) || min_margin >= spacing_need;
  rep.issues.push_back({"failure-window spacing", rep.assumption_spacing_ok,
                        "worst margin " + std::to_string(min_margin) + " vs required " +
                            std::to_string(spacing_need)});

  // Adequacy: the fleet minus its largest unit still covers every day's load.
  double cap_total = 0.0, cap_max = 0.0;
  for (const auto& a : agents) {
    cap_total += a.q_max;
    cap_max = std::max(cap_max, a.q_max);
  }
  double peak = net.total_load.empty()
                    ? 0.0
                    : *std::max_element(net.total_load.begin(), net.total_load.end());
  rep.assumption_adequacy_ok = (cap_total - cap_max >= peak);
  rep.issues.push_back({"single-outage adequacy", rep.assumption_adequacy_ok,
                        "remaining capacity " + std::to_string(cap_total - cap_max) +
                            " MW vs peak load " + std::to_string(peak) + " MW"});

  rep.structural_ok = true;
  rep.issues.push_back({"structure", true, "all structural checks passed"});
  return rep;
}

}  // namespace gms
