// Smallest end-to-end run: two units on one bus, one predicted fault each,
// fourteen days. Both units want the same two maintenance days; the
// negotiation splits them and settles in two rounds.

#include <cstdio>

#include "gms/gms.hpp"

int main() {
  gms::TimeGrid grid{14};

  gms::NetworkModel net;
  net.buses = {1};
  net.load_share[1] = 1.0;
  for (int t = 0; t < grid.horizon_length; ++t) {
    net.total_load.push_back(15.0);  // one unit covers it; two at once cannot leave
    net.price.push_back(10.0);
  }

  std::vector<gms::AgentProfile> agents;
  for (int id = 1; id <= 2; ++id) {
    gms::AgentProfile ag;
    ag.id = id;
    ag.bus = 1;
    ag.q_max = 20.0;
    ag.marginal_cost = 0.5;
    ag.repair_time = 2;
    ag.alpha = 4.0;
    gms::FaultEvent ev;
    ev.detect_time = id;           // detected on day 1 / day 2
    ev.rul_mean = 8.0;             // expected failure around day 8
    ev.rul_std = 0.0;
    ev.window_start = 1;
    ev.window_end = grid.horizon_length;
    ag.events.push_back(ev);
    net.unit_bus[id] = ag.bus;
    agents.push_back(ag);
  }

  gms::NegotiationOptions opts;
  opts.scenario_count = 1;  // deterministic failure day
  auto res = gms::run_negotiation(agents, net, grid, opts);

  std::printf("converged=%s after %d iterations\n", res.converged ? "yes" : "no",
              res.iterations);
  for (const auto& ag : agents) {
    const auto& y = res.final_schedule.y[static_cast<size_t>(ag.id - 1)];
    std::printf("unit %d maintenance days:", ag.id);
    for (int t = 0; t < grid.horizon_length; ++t)
      if (y[static_cast<size_t>(t)]) std::printf(" %d", t + 1);
    std::printf("\n");
  }

  auto budget = gms::audit_budget_balance(res);
  std::printf("weak budget balance: %s, exact at convergence: %s\n",
              budget.weak_ok ? "yes" : "no", budget.exact_ok ? "yes" : "no");
  return res.converged ? 0 : 1;
}
