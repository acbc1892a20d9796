#pragma once

// Small hand-built systems reused across test files.

#include <vector>

#include "gms/domain.hpp"

namespace gmstest {

// Two units on a two-bus grid joined by one generous line. Loads flat.
// Each agent has one event with a wide window.
inline std::pair<std::vector<gms::AgentProfile>, gms::NetworkModel> two_unit_system(
    int horizon = 40, double load_mw = 12.0) {
  std::vector<gms::AgentProfile> agents(2);
  agents[0].id = 1;
  agents[0].bus = 1;
  agents[0].q_max = 10.0;
  agents[0].marginal_cost = 5.0;
  agents[0].repair_time = 2;
  agents[0].alpha = 1.0;
  agents[0].events = {{5, 20.0, 2.0, 1, 30}};
  agents[1].id = 2;
  agents[1].bus = 2;
  agents[1].q_max = 10.0;
  agents[1].marginal_cost = 6.0;
  agents[1].repair_time = 2;
  agents[1].alpha = 1.0;
  agents[1].events = {{6, 25.0, 2.0, 1, 34}};

  gms::NetworkModel net;
  net.buses = {1, 2};
  net.lines = {{1, 2, 10.0, 500.0}};
  net.unit_bus = {{1, 1}, {2, 2}};
  net.load_share = {{1, 0.5}, {2, 0.5}};
  net.total_load.assign(static_cast<size_t>(horizon), load_mw);
  net.price.assign(static_cast<size_t>(horizon), 30.0);
  return {agents, net};
}

}  // namespace gmstest
