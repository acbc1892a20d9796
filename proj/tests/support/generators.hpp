#pragma once

// Random but always-valid instance families shared by the unit and
// acceptance suites. All randomness flows through the caller's engine so a
// master seed reproduces every instance.

#include <algorithm>
#include <random>
#include <vector>

#include "gms/agent_opt.hpp"
#include "gms/domain.hpp"
#include "gms/scenarios.hpp"

namespace gmstest {

struct AgentInstance {
  gms::AgentProfile agent;
  std::vector<gms::ScenarioSet> scens;
  std::vector<double> price;
  gms::TimeGrid grid;
  std::vector<double> incentive;  // empty = none
  gms::DeteriorationForm form = gms::DeteriorationForm::PerScenarioSign;
};

// Small horizon, one or two fault windows, optional penalty days. Windows
// partition the horizon and each leaves room for failure-time spread.
inline AgentInstance random_agent_instance(std::mt19937_64& rng, int max_horizon = 12,
                                           int max_repair = 3) {
  AgentInstance inst;
  const int horizon = 8 + static_cast<int>(rng() % (max_horizon - 7));
  inst.grid = gms::TimeGrid{horizon};
  const int events = (horizon >= 10 && rng() % 2 == 0) ? 2 : 1;

  gms::AgentProfile& ag = inst.agent;
  ag.id = 1;
  ag.bus = 1;
  ag.q_min = 0.0;
  ag.q_max = 1.0 + static_cast<double>(rng() % 10);
  ag.marginal_cost = static_cast<double>(rng() % 9);
  ag.repair_time = 1 + static_cast<int>(rng() % max_repair);
  const double alphas[] = {0.1, 1.0, 10.0};
  ag.alpha = alphas[rng() % 3];

  std::vector<std::pair<int, int>> spans;
  if (events == 1) {
    spans.push_back({1, horizon});
  } else {
    const int cut = 5 + static_cast<int>(rng() % (horizon - 9));  // both sides >= 5
    spans.push_back({1, cut});
    spans.push_back({cut + 1, horizon});
  }
  for (auto [ws, we] : spans) {
    gms::FaultEvent ev;
    ev.window_start = ws;
    ev.window_end = we;
    ev.detect_time = ws + static_cast<int>(rng() % 2);
    const int span = we - ev.detect_time;  // >= 3 by construction
    ev.rul_mean = ev.detect_time + 1 + static_cast<double>(rng() % span);
    ev.rul_std = (rng() % 3 == 0) ? 0.0 : 0.5 + static_cast<double>(rng() % 3) * 0.5;
    ag.events.push_back(ev);
  }

  inst.price.resize(static_cast<size_t>(horizon));
  for (auto& p : inst.price) p = static_cast<double>(rng() % 51);

  const int draws = 1 + static_cast<int>(rng() % 4);
  for (size_t k = 0; k < ag.events.size(); ++k)
    inst.scens.push_back(gms::sample_scenarios(ag.events[k], draws,
                                               gms::derive_event_seed(rng(), ag.id, static_cast<int>(k))));

  if (rng() % 3 == 0) {
    inst.incentive.assign(static_cast<size_t>(horizon), 0.0);
    const int hits = 1 + static_cast<int>(rng() % 3);
    for (int i = 0; i < hits; ++i) {
      const int day = 1 + static_cast<int>(rng() % horizon);
      const double mag = std::pow(10.0, static_cast<double>(rng() % 4));
      inst.incentive[static_cast<size_t>(day - 1)] = (rng() % 2 == 0) ? -mag : mag;
    }
  }
  if (rng() % 2 == 0) inst.form = gms::DeteriorationForm::ExpectedBracket;
  return inst;
}

struct GridInstance {
  std::vector<gms::AgentProfile> agents;
  std::vector<std::vector<gms::ScenarioSet>> scens;
  std::vector<std::vector<uint8_t>> x;  // request lattice
  gms::NetworkModel net;
  gms::TimeGrid grid;
};

// Tiny connected grid with zero-minimum units, a moderately tight load and
// a random request lattice. Sized for exhaustive cross-checking.
inline GridInstance random_grid_instance(std::mt19937_64& rng) {
  GridInstance g;
  const int horizon = 3 + static_cast<int>(rng() % 3);
  g.grid = gms::TimeGrid{horizon};

  const int nb = 2 + static_cast<int>(rng() % 3);
  for (int b = 1; b <= nb; ++b) g.net.buses.push_back(b);
  for (int b = 2; b <= nb; ++b) {
    gms::Line ln;
    ln.from = 1 + static_cast<int>(rng() % (b - 1));
    ln.to = b;
    ln.susceptance = (1.0 + static_cast<double>(rng() % 10)) / 10.0;
    ln.capacity = 10.0 + static_cast<double>(rng() % 31);
    g.net.lines.push_back(ln);
  }
  if (nb >= 3 && rng() % 2 == 0) {
    gms::Line ln;
    ln.from = 1;
    ln.to = nb;
    ln.susceptance = (1.0 + static_cast<double>(rng() % 10)) / 10.0;
    ln.capacity = 10.0 + static_cast<double>(rng() % 31);
    bool dup = false;
    for (const auto& other : g.net.lines)
      if ((other.from == ln.from && other.to == ln.to) ||
          (other.from == ln.to && other.to == ln.from))
        dup = true;
    if (!dup) g.net.lines.push_back(ln);
  }

  const int units = 2 + static_cast<int>(rng() % 3);
  double cap_total = 0.0;
  for (int i = 1; i <= units; ++i) {
    gms::AgentProfile ag;
    ag.id = i;
    ag.bus = 1 + static_cast<int>(rng() % nb);
    ag.q_min = 0.0;
    ag.q_max = 5.0 + static_cast<double>(rng() % 16);
    ag.marginal_cost = 1.0 + static_cast<double>(rng() % 5);
    ag.repair_time = 1 + static_cast<int>(rng() % 2);
    ag.alpha = 1.0;
    gms::FaultEvent ev;
    ev.window_start = 1;
    ev.window_end = horizon;
    ev.detect_time = 1;
    ev.rul_mean = 2.0 + static_cast<double>(rng() % (horizon - 1));
    ev.rul_std = (rng() % 2 == 0) ? 0.0 : 0.6;
    ag.events.push_back(ev);
    cap_total += ag.q_max;
    g.net.unit_bus[ag.id] = ag.bus;
    g.agents.push_back(ag);
  }

  double share_total = 0.0;
  std::vector<double> share(static_cast<size_t>(nb));
  for (int b = 0; b < nb; ++b) {
    share[static_cast<size_t>(b)] = 1.0 + static_cast<double>(rng() % 9);
    share_total += share[static_cast<size_t>(b)];
  }
  for (int b = 0; b < nb; ++b)
    g.net.load_share[b + 1] = share[static_cast<size_t>(b)] / share_total;
  g.net.total_load.resize(static_cast<size_t>(horizon));
  for (auto& l : g.net.total_load)
    l = cap_total * (0.3 + 0.05 * static_cast<double>(rng() % 9));
  g.net.price.assign(static_cast<size_t>(horizon), 20.0);

  for (size_t i = 0; i < g.agents.size(); ++i) {
    std::vector<gms::ScenarioSet> sets;
    const int draws = 1 + static_cast<int>(rng() % 3);
    sets.push_back(gms::sample_scenarios(g.agents[i].events[0], draws,
                                         gms::derive_event_seed(rng(), g.agents[i].id, 0)));
    g.scens.push_back(std::move(sets));
  }

  g.x.assign(g.agents.size(), std::vector<uint8_t>(static_cast<size_t>(horizon), 0));
  for (size_t i = 0; i < g.agents.size(); ++i) {
    if (rng() % 5 == 0) continue;  // some units stay quiet
    const int len = 1 + static_cast<int>(rng() % g.agents[i].repair_time);
    const int start = 1 + static_cast<int>(rng() % (horizon - len + 1));
    for (int t = start; t < start + len; ++t) g.x[i][static_cast<size_t>(t - 1)] = 1;
  }
  return g;
}

struct NegotiationInstance {
  std::vector<gms::AgentProfile> agents;
  gms::NetworkModel net;
  gms::TimeGrid grid;
};

// Family built for full negotiation runs: wear grows fast enough across the
// shared window that blocks gravitate to the failure times, the fleet can
// spare any single unit but rarely two, and clustered failure predictions
// force genuine schedule conflicts.
inline NegotiationInstance negotiation_instance(std::mt19937_64& rng) {
  NegotiationInstance inst;
  const int horizon = 20 + static_cast<int>(rng() % 11);
  inst.grid = gms::TimeGrid{horizon};
  const int units = 2 + static_cast<int>(rng() % 3);
  const int nb = 2 + static_cast<int>(rng() % 2);

  for (int b = 1; b <= nb; ++b) inst.net.buses.push_back(b);

  double cap_total = 0.0, cap_max = 0.0, cap_second = 0.0;
  for (int i = 1; i <= units; ++i) {
    gms::AgentProfile ag;
    ag.id = i;
    ag.bus = 1 + static_cast<int>(rng() % nb);
    ag.q_min = 0.0;
    ag.q_max = 8.0 + static_cast<double>(rng() % 13);
    ag.marginal_cost = 1.0 + static_cast<double>(rng() % 5);
    ag.repair_time = 1 + static_cast<int>(rng() % 2);
    ag.alpha = 2.0 + static_cast<double>(rng() % 10);
    gms::FaultEvent ev;
    ev.window_start = 1;
    ev.window_end = horizon;
    ev.detect_time = 1 + static_cast<int>(rng() % 3);
    // failures cluster near the end of the horizon
    ev.rul_mean = static_cast<double>(horizon - 6 + static_cast<int>(rng() % 5));
    ev.rul_std = static_cast<double>(rng() % 2);
    ag.events.push_back(ev);
    cap_total += ag.q_max;
    if (ag.q_max >= cap_max) {
      cap_second = cap_max;
      cap_max = ag.q_max;
    } else if (ag.q_max > cap_second) {
      cap_second = ag.q_max;
    }
    inst.net.unit_bus[ag.id] = ag.bus;
    inst.agents.push_back(ag);
  }

  for (int b = 2; b <= nb; ++b)
    inst.net.lines.push_back({b - 1, b, 5.0, cap_total});  // never binding

  double share_total = 0.0;
  std::vector<double> share(static_cast<size_t>(nb));
  for (int b = 0; b < nb; ++b) {
    share[static_cast<size_t>(b)] = 1.0 + static_cast<double>(rng() % 9);
    share_total += share[static_cast<size_t>(b)];
  }
  for (int b = 0; b < nb; ++b)
    inst.net.load_share[b + 1] = share[static_cast<size_t>(b)] / share_total;

  // one unit can always leave; the two largest never may at once
  const double lo = cap_total - cap_max - cap_second;
  const double hi = (cap_total - cap_max) * 0.9;
  const double load = std::max(lo * 1.05, hi * (0.7 + 0.03 * static_cast<double>(rng() % 10)));
  inst.net.total_load.assign(static_cast<size_t>(horizon), std::min(load, hi));
  inst.net.price.assign(static_cast<size_t>(horizon),
                        10.0 + static_cast<double>(rng() % 30));
  return inst;
}

}  // namespace gmstest
