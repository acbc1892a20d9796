#pragma once

// Profit-maximizing maintenance placement for one generation agent.
//
// The objective decomposes day by day: masking day t trades forfeited sale
// margin against avoided wear, plus any negotiation penalty sitting on t.
// Each fault window then takes one contiguous block chosen by enumeration,
// which is exact because windows are disjoint and the objective is linear
// in the mask.

#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "gms/domain.hpp"
#include "gms/scenarios.hpp"

namespace gms {

// Two readings of how scenario weight enters the wear term. PerScenarioSign
// keeps the detection sign unweighted inside the per-scenario sum;
// ExpectedBracket weights the whole bracket by scenario probability. They
// coincide for a single scenario.
enum class DeteriorationForm { PerScenarioSign, ExpectedBracket };

struct AgentDecision {
  std::vector<uint8_t> x;                  // day t-1 -> down for maintenance
  std::vector<std::pair<int, int>> blocks; // per event: {start day, length}
  double objective = 0.0;                  // reward - deterioration + incentive
  double reward = 0.0;
  double deterioration = 0.0;
  double incentive = 0.0;
};

namespace agentdetail {

inline void check_inputs(const AgentProfile& ag, const std::vector<ScenarioSet>& scens,
                         const std::vector<double>& price, const TimeGrid& grid) {
  detail::require(scens.size() == ag.events.size(),
                  "agent " + std::to_string(ag.id) + ": one scenario set per event required");
  detail::require(static_cast<int>(price.size()) >= grid.horizon_length,
                  "price series shorter than the horizon");
}

}  // namespace agentdetail

// Expected margin weight of keeping day t available, summed over events:
// before an event's failure the unit still earns price*q - cost.
inline std::vector<double> day_reward_weights(const AgentProfile& ag,
                                              const std::vector<ScenarioSet>& scens,
                                              const std::vector<double>& price,
                                              const TimeGrid& grid) {
  agentdetail::check_inputs(ag, scens, price, grid);
  const double c = ag.gen_cost(ag.q_max);
  std::vector<double> w(static_cast<size_t>(grid.horizon_length), 0.0);
  for (int t = 1; t <= grid.horizon_length; ++t) {
    double alive = 0.0;
    for (const auto& set : scens) alive += expected_indicator_alive(set, t);
    w[static_cast<size_t>(t - 1)] = (price[static_cast<size_t>(t - 1)] * ag.q_max - c) * alive;
  }
  return w;
}

// Wear weight of running through day t: exponential growth from detection
// until the (scenario) failure time, per event.
inline std::vector<double> day_deterioration_weights(const AgentProfile& ag,
                                                     const std::vector<ScenarioSet>& scens,
                                                     const TimeGrid& grid,
                                                     DeteriorationForm form) {
  detail::require(scens.size() == ag.events.size(),
                  "agent " + std::to_string(ag.id) + ": one scenario set per event required");
  std::vector<double> w(static_cast<size_t>(grid.horizon_length), 0.0);
  for (size_t k = 0; k < ag.events.size(); ++k) {
    const int t1 = ag.events[k].detect_time;
    for (int t = 1; t <= grid.horizon_length; ++t) {
      double bracket = 0.0;
      for (const auto& sc : scens[k].items) {
        if (form == DeteriorationForm::PerScenarioSign)
          bracket += sign(t - t1) - sc.prob * sign(t - sc.fail_time);
        else
          bracket += sc.prob * (sign(t - t1) - sign(t - sc.fail_time));
      }
      if (bracket != 0.0)
        w[static_cast<size_t>(t - 1)] += ag.alpha * std::exp(static_cast<double>(t - t1)) * bracket;
    }
  }
  return w;
}

inline double expected_reward(const AgentProfile& ag, const std::vector<ScenarioSet>& scens,
                              const std::vector<uint8_t>& x, const std::vector<double>& price,
                              const TimeGrid& grid) {
  auto w = day_reward_weights(ag, scens, price, grid);
  detail::require(x.size() == w.size(), "mask length must equal the horizon");
  double total = 0.0;
  for (size_t i = 0; i < w.size(); ++i)
    if (!x[i]) total += w[i];
  return total;
}

inline double deterioration_cost(const AgentProfile& ag, const std::vector<ScenarioSet>& scens,
                                 const std::vector<uint8_t>& x, const TimeGrid& grid,
                                 DeteriorationForm form) {
  auto w = day_deterioration_weights(ag, scens, grid, form);
  detail::require(x.size() == w.size(), "mask length must equal the horizon");
  double total = 0.0;
  for (size_t i = 0; i < w.size(); ++i)
    if (!x[i]) total += w[i];
  return total;
}

// Smallest penalty rate that makes vacating a flagged day always preferable:
// one flagged day can pay at most the best single-day masking gain, so any
// rate above the maximum of (wear - margin) over days does it.
inline double gamma_bound(const AgentProfile& ag, const std::vector<ScenarioSet>& scens,
                          const std::vector<double>& price, const TimeGrid& grid,
                          DeteriorationForm form) {
  auto rw = day_reward_weights(ag, scens, price, grid);
  auto dw = day_deterioration_weights(ag, scens, grid, form);
  double worst = 0.0;
  for (size_t i = 0; i < rw.size(); ++i) worst = std::max(worst, dw[i] - rw[i]);
  return worst;
}

inline double effective_gamma(const AgentProfile& ag, const std::vector<ScenarioSet>& scens,
                              const std::vector<double>& price, const TimeGrid& grid,
                              DeteriorationForm form) {
  if (!ag.gamma_auto) return ag.gamma;
  return std::max(1.0, 1.01 * gamma_bound(ag, scens, price, grid, form));
}

// Exact maximizer of reward - deterioration + incentive over masks with one
// contiguous block of length 1..repair_time inside each fault window.
// `incentive` holds the signed per-day penalty credit (already scaled by the
// agent's penalty rate); empty means no negotiation pressure.
inline AgentDecision solve_agent(const AgentProfile& ag, const std::vector<ScenarioSet>& scens,
                                 const std::vector<double>& price, const TimeGrid& grid,
                                 DeteriorationForm form = DeteriorationForm::PerScenarioSign,
                                 const std::vector<double>& incentive = {}) {
  agentdetail::check_inputs(ag, scens, price, grid);
  const int horizon = grid.horizon_length;
  detail::require(incentive.empty() || static_cast<int>(incentive.size()) == horizon,
                  "incentive series must match the horizon");

  auto rw = day_reward_weights(ag, scens, price, grid);
  auto dw = day_deterioration_weights(ag, scens, grid, form);
  std::vector<double> gain(static_cast<size_t>(horizon), 0.0);
  for (int i = 0; i < horizon; ++i) {
    gain[static_cast<size_t>(i)] = dw[static_cast<size_t>(i)] - rw[static_cast<size_t>(i)];
    if (!incentive.empty()) gain[static_cast<size_t>(i)] += incentive[static_cast<size_t>(i)];
  }

  AgentDecision dec;
  dec.x.assign(static_cast<size_t>(horizon), 0);
  for (const auto& ev : ag.events) {
    const int ws = ev.window_start, we = ev.window_end;
    const int len_cap = std::min(ag.repair_time, we - ws + 1);
    double best = -std::numeric_limits<double>::infinity();
    int best_start = ws, best_len = 1;
    for (int b = ws; b <= we; ++b) {
      double sum = 0.0;
      const int max_len = std::min(len_cap, we - b + 1);
      for (int len = 1; len <= max_len; ++len) {
        sum += gain[static_cast<size_t>(b + len - 1 - 1)];
        if (sum > best) {
          best = sum;
          best_start = b;
          best_len = len;
        }
      }
    }
    dec.blocks.push_back({best_start, best_len});
    for (int t = best_start; t < best_start + best_len; ++t) dec.x[static_cast<size_t>(t - 1)] = 1;
  }

  dec.reward = expected_reward(ag, scens, dec.x, price, grid);
  dec.deterioration = deterioration_cost(ag, scens, dec.x, grid, form);
  if (!incentive.empty())
    for (int i = 0; i < horizon; ++i)
      if (dec.x[static_cast<size_t>(i)]) dec.incentive += incentive[static_cast<size_t>(i)];
  dec.objective = dec.reward - dec.deterioration + dec.incentive;
  return dec;
}

}  // namespace gms
