#pragma once

// Iterated scheduling between self-interested units and the grid operator.
// Each round the units place their maintenance requests, the operator keeps
// what the grid can absorb, and every refused day-slot deepens a standing
// penalty that pushes the unit's next request elsewhere. The run settles
// once everything requested is accepted.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "gms/agent_opt.hpp"
#include "gms/domain.hpp"
#include "gms/scenarios.hpp"
#include "gms/tso_opt.hpp"

namespace gms {

struct NegotiationOptions {
  uint64_t master_seed = 1;
  int scenario_count = 50;
  SampleMethod method = SampleMethod::MonteCarlo;
  DeteriorationForm form = DeteriorationForm::PerScenarioSign;
  TsoOptions tso;
  int max_iterations = 50;
};

// Penalty actually charged on one day: the rate, gated by the unit masking
// the day, directed by the sign of the unit's accumulated refusals there.
inline double incentive_paid(double gamma, bool masked, int refusals_acc) {
  return masked ? gamma * sign(static_cast<double>(refusals_acc)) : 0.0;
}

struct IterationRecord {
  std::vector<std::vector<uint8_t>> x, y;   // requested / accepted
  std::vector<double> reward;               // per agent, expectation form
  std::vector<double> deterioration;        // per agent, objective form
  std::vector<double> objective;            // per agent
  std::vector<double> incentive;            // per agent, penalties charged
  double ledger_total = 0.0;                // sum of all penalties charged
  int rejected_slots = 0;                   // agent-day pairs refused
};

struct NegotiationResult {
  bool converged = false;
  int iterations = 0;
  std::vector<IterationRecord> history;
  ScheduleMatrix final_schedule;            // dispatch of the last round
  std::vector<std::vector<double>> final_flow;  // [line][day] MW
  std::vector<double> gamma;                // effective penalty rate per agent
  std::vector<std::vector<ScenarioSet>> scens;  // [agent][event]
  ValidationReport validation;
};

inline NegotiationResult run_negotiation(const std::vector<AgentProfile>& agents,
                                         const NetworkModel& net, const TimeGrid& grid,
                                         const NegotiationOptions& opts = {}) {
  NegotiationResult res;
  res.validation = validate_inputs(agents, net, grid);
  detail::require(opts.max_iterations >= 1, "need at least one iteration");
  detail::require(opts.scenario_count >= 1, "need at least one scenario");
  const int n = static_cast<int>(agents.size());
  const int horizon = grid.horizon_length;

  for (int i = 0; i < n; ++i) {
    std::vector<ScenarioSet> sets;
    for (size_t k = 0; k < agents[static_cast<size_t>(i)].events.size(); ++k)
      sets.push_back(sample_scenarios(
          agents[static_cast<size_t>(i)].events[k], opts.scenario_count,
          derive_event_seed(opts.master_seed, agents[static_cast<size_t>(i)].id, static_cast<int>(k)),
          opts.method));
    res.scens.push_back(std::move(sets));
  }
  for (int i = 0; i < n; ++i)
    res.gamma.push_back(effective_gamma(agents[static_cast<size_t>(i)], res.scens[static_cast<size_t>(i)],
                                        net.price, grid, opts.form));

  // standing refusal balance per agent-day: accepted minus requested so far
  std::vector<std::vector<int>> acc(static_cast<size_t>(n),
                                    std::vector<int>(static_cast<size_t>(horizon), 0));
  TsoCache cache;

  for (int iter = 1; iter <= opts.max_iterations; ++iter) {
    IterationRecord rec;
    std::vector<std::vector<uint8_t>> x;
    for (int i = 0; i < n; ++i) {
      std::vector<double> inc(static_cast<size_t>(horizon), 0.0);
      for (int t = 0; t < horizon; ++t)
        inc[static_cast<size_t>(t)] =
            res.gamma[static_cast<size_t>(i)] *
            sign(static_cast<double>(acc[static_cast<size_t>(i)][static_cast<size_t>(t)]));
      auto dec = solve_agent(agents[static_cast<size_t>(i)], res.scens[static_cast<size_t>(i)],
                             net.price, grid, opts.form, inc);
      x.push_back(dec.x);
      rec.reward.push_back(dec.reward);
      rec.deterioration.push_back(dec.deterioration);
      rec.objective.push_back(dec.objective);
      rec.incentive.push_back(dec.incentive);
      rec.ledger_total += dec.incentive;
    }

    auto tso = solve_tso(agents, res.scens, x, net, grid, opts.tso, &cache);
    rec.x = std::move(x);
    rec.y = tso.schedule.y;
    for (int i = 0; i < n; ++i)
      for (int t = 0; t < horizon; ++t) {
        const int dy = static_cast<int>(rec.y[static_cast<size_t>(i)][static_cast<size_t>(t)]) -
                       static_cast<int>(rec.x[static_cast<size_t>(i)][static_cast<size_t>(t)]);
        if (dy != 0) rec.rejected_slots++;
        acc[static_cast<size_t>(i)][static_cast<size_t>(t)] += dy;
      }

    const bool settled = (rec.rejected_slots == 0);
    res.history.push_back(std::move(rec));
    if (settled || iter == opts.max_iterations) {
      res.converged = settled;
      res.final_schedule = std::move(tso.schedule);
      res.final_flow = std::move(tso.flow);
      break;
    }
  }
  res.iterations = static_cast<int>(res.history.size());
  return res;
}

// ---- audits ---------------------------------------------------------------

struct BudgetAudit {
  std::vector<double> per_iteration;  // total penalties charged each round
  bool weak_ok = false;               // never a net payout to the agents
  bool exact_ok = false;              // settled round charges exactly nothing
};

inline BudgetAudit audit_budget_balance(const NegotiationResult& r, double tol = 1e-9) {
  BudgetAudit a;
  a.weak_ok = true;
  for (const auto& rec : r.history) {
    a.per_iteration.push_back(rec.ledger_total);
    if (rec.ledger_total > tol) a.weak_ok = false;
  }
  a.exact_ok = r.converged && !a.per_iteration.empty() &&
               std::fabs(a.per_iteration.back()) <= tol;
  return a;
}

struct RationalityEntry {
  int agent_id = 0;
  std::vector<double> round_net;  // requested-schedule objective, per round
  double reward = 0.0;            // expectation form, on the settled schedule
  double deterioration = 0.0;     // same mask, chosen wear form
  double incentive = 0.0;         // penalties accumulated over the run
  double net = 0.0;
  bool rational = false;          // settled net and every round non-negative
};

// Participation check, per round and on the settled outcome. Reported, never
// enforced: a unit whose wear dwarfs its margin shows up negative here by
// design.
inline std::vector<RationalityEntry> audit_individual_rationality(
    const std::vector<AgentProfile>& agents, const NegotiationResult& r,
    const NetworkModel& net, const TimeGrid& grid,
    DeteriorationForm form = DeteriorationForm::PerScenarioSign) {
  const auto ok = [](double v) { return v >= -1e-9 * std::max(1.0, std::fabs(v)); };
  std::vector<RationalityEntry> out;
  for (size_t i = 0; i < agents.size(); ++i) {
    RationalityEntry e;
    e.agent_id = agents[i].id;
    for (const auto& rec : r.history) e.round_net.push_back(rec.objective[i]);
    const auto& mask = r.final_schedule.y[i];
    e.reward = expected_reward(agents[i], r.scens[i], mask, net.price, grid);
    e.deterioration = deterioration_cost(agents[i], r.scens[i], mask, grid, form);
    for (const auto& rec : r.history) e.incentive += rec.incentive[i];
    e.net = e.reward - e.deterioration + e.incentive;
    e.rational = ok(e.net);
    for (double v : e.round_net)
      if (!ok(v)) e.rational = false;
    out.push_back(e);
  }
  return out;
}

struct MonotonicityEntry {
  int agent_id = 0;
  bool penalized = false;       // refused before the final round
  bool non_decreasing = true;   // reward component across rounds
};

inline std::vector<MonotonicityEntry> audit_reward_monotonicity(
    const std::vector<AgentProfile>& agents, const NegotiationResult& r) {
  std::vector<MonotonicityEntry> out;
  const size_t rounds = r.history.size();
  for (size_t i = 0; i < agents.size(); ++i) {
    MonotonicityEntry e;
    e.agent_id = agents[i].id;
    for (size_t j = 0; j + 1 < rounds; ++j)
      for (size_t t = 0; t < r.history[j].x[i].size(); ++t)
        if (r.history[j].y[i][t] < r.history[j].x[i][t]) e.penalized = true;
    for (size_t j = 0; j + 1 < rounds; ++j) {
      const double a = r.history[j].reward[i], b = r.history[j + 1].reward[i];
      if (b < a - 1e-9 * std::max(1.0, std::fabs(a))) e.non_decreasing = false;
    }
    out.push_back(e);
  }
  return out;
}

}  // namespace gms
