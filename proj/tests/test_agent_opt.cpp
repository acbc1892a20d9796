#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "gms/agent_opt.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using gms::AgentProfile;
using gms::DeteriorationForm;
using gms::FaultEvent;
using gms::TimeGrid;

namespace {

// one agent, one fault: detected day 2, fails day 4 for sure, window [1,5]
gmstest::AgentInstance worked_case() {
  gmstest::AgentInstance inst;
  inst.grid = TimeGrid{5};
  AgentProfile& ag = inst.agent;
  ag.id = 1;
  ag.bus = 1;
  ag.q_max = 2.0;
  ag.marginal_cost = 4.0;
  ag.repair_time = 3;
  ag.alpha = 1.0;
  ag.events.push_back(FaultEvent{2, 4.0, 0.0, 1, 5});
  inst.price.assign(5, 10.0);
  inst.scens.push_back(gms::sample_scenarios(ag.events[0], 1, 99));
  return inst;
}

}  // namespace

TEST_CASE("wear cost of running through a certain failure") {
  auto inst = worked_case();
  std::vector<uint8_t> idle(5, 0);
  const double e = std::exp(1.0);
  const double want = 1.0 + 2.0 * e + e * e;  // days 2, 3, 4

  for (auto form : {DeteriorationForm::PerScenarioSign, DeteriorationForm::ExpectedBracket}) {
    CHECK(gms::deterioration_cost(inst.agent, inst.scens, idle, inst.grid, form) ==
          Catch::Approx(want));
  }

  SECTION("masking the whole detection-to-failure span removes all wear") {
    std::vector<uint8_t> x = {0, 1, 1, 1, 0};
    CHECK(gms::deterioration_cost(inst.agent, inst.scens, x, inst.grid,
                                  DeteriorationForm::PerScenarioSign) ==
          Catch::Approx(0.0).margin(1e-12));
  }
  SECTION("masking only the middle day keeps the endpoint halves") {
    std::vector<uint8_t> x = {0, 0, 1, 0, 0};
    CHECK(gms::deterioration_cost(inst.agent, inst.scens, x, inst.grid,
                                  DeteriorationForm::PerScenarioSign) ==
          Catch::Approx(1.0 + e * e));
  }
}

TEST_CASE("margin earned while the unit is still alive") {
  auto inst = worked_case();
  std::vector<uint8_t> idle(5, 0);
  // margin 10*2-8=12 per day, alive weight 1,1,1,.5,0
  CHECK(gms::expected_reward(inst.agent, inst.scens, idle, inst.price, inst.grid) ==
        Catch::Approx(42.0));

  std::vector<uint8_t> x = {1, 0, 0, 0, 0};
  CHECK(gms::expected_reward(inst.agent, inst.scens, x, inst.price, inst.grid) ==
        Catch::Approx(30.0));
}

TEST_CASE("heavy wear pushes the block against the failure time") {
  gmstest::AgentInstance inst;
  inst.grid = TimeGrid{12};
  AgentProfile& ag = inst.agent;
  ag.id = 3;
  ag.bus = 1;
  ag.q_max = 5.0;
  ag.marginal_cost = 10.0;
  ag.repair_time = 2;
  ag.alpha = 1.0;
  ag.events.push_back(FaultEvent{2, 10.0, 0.0, 1, 12});
  inst.price.assign(12, 10.0);  // margin exactly zero
  inst.scens.push_back(gms::sample_scenarios(ag.events[0], 1, 7));

  auto dec = gms::solve_agent(ag, inst.scens, inst.price, inst.grid);
  REQUIRE(dec.blocks.size() == 1);
  CHECK(dec.blocks[0].first == 9);
  CHECK(dec.blocks[0].second == 2);
  CHECK(dec.x[8] == 1);
  CHECK(dec.x[9] == 1);
  CHECK(dec.objective == Catch::Approx(dec.reward - dec.deterioration));
}

TEST_CASE("flat objective falls back to the earliest shortest block") {
  gmstest::AgentInstance inst;
  inst.grid = TimeGrid{8};
  AgentProfile& ag = inst.agent;
  ag.id = 4;
  ag.bus = 1;
  ag.q_max = 3.0;
  ag.marginal_cost = 7.0;
  ag.repair_time = 3;
  ag.alpha = 0.0;  // no wear at all
  ag.events.push_back(FaultEvent{2, 5.0, 0.0, 1, 8});
  inst.price.assign(8, 7.0);  // margin zero everywhere
  inst.scens.push_back(gms::sample_scenarios(ag.events[0], 1, 7));

  auto dec = gms::solve_agent(ag, inst.scens, inst.price, inst.grid);
  REQUIRE(dec.blocks.size() == 1);
  CHECK(dec.blocks[0] == std::make_pair(1, 1));
}

TEST_CASE("penalties on the preferred days push the block away") {
  gmstest::AgentInstance inst;
  inst.grid = TimeGrid{12};
  AgentProfile& ag = inst.agent;
  ag.id = 5;
  ag.bus = 1;
  ag.q_max = 5.0;
  ag.marginal_cost = 10.0;
  ag.repair_time = 2;
  ag.alpha = 1.0;
  ag.events.push_back(FaultEvent{2, 10.0, 0.0, 1, 12});
  inst.price.assign(12, 10.0);
  inst.scens.push_back(gms::sample_scenarios(ag.events[0], 1, 7));

  const double gamma =
      gms::effective_gamma(ag, inst.scens, inst.price, inst.grid, DeteriorationForm::PerScenarioSign);
  std::vector<double> incentive(12, 0.0);
  incentive[8] = -gamma;
  incentive[9] = -gamma;

  auto dec = gms::solve_agent(ag, inst.scens, inst.price, inst.grid,
                              DeteriorationForm::PerScenarioSign, incentive);
  REQUIRE(dec.blocks.size() == 1);
  CHECK(dec.blocks[0].first + dec.blocks[0].second - 1 <= 8);
  CHECK(dec.incentive == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("penalty rate bounds") {
  auto inst = worked_case();
  SECTION("auto rate clears the best single-day gain") {
    auto rw = gms::day_reward_weights(inst.agent, inst.scens, inst.price, inst.grid);
    auto dw = gms::day_deterioration_weights(inst.agent, inst.scens, inst.grid,
                                             DeteriorationForm::PerScenarioSign);
    double worst = 0.0;
    for (size_t i = 0; i < rw.size(); ++i) worst = std::max(worst, dw[i] - rw[i]);
    CHECK(gms::gamma_bound(inst.agent, inst.scens, inst.price, inst.grid,
                           DeteriorationForm::PerScenarioSign) == Catch::Approx(worst));
    CHECK(gms::effective_gamma(inst.agent, inst.scens, inst.price, inst.grid,
                               DeteriorationForm::PerScenarioSign) >=
          std::max(1.0, 1.01 * worst) - 1e-12);
  }
  SECTION("an explicit rate is taken as given") {
    inst.agent.gamma_auto = false;
    inst.agent.gamma = 5.0;
    CHECK(gms::effective_gamma(inst.agent, inst.scens, inst.price, inst.grid,
                               DeteriorationForm::PerScenarioSign) == 5.0);
  }
}

TEST_CASE("solver matches exhaustive enumeration on random instances") {
  std::mt19937_64 rng(404);
  for (int trial = 0; trial < 150; ++trial) {
    auto inst = gmstest::random_agent_instance(rng);
    auto dec = gms::solve_agent(inst.agent, inst.scens, inst.price, inst.grid, inst.form,
                                inst.incentive);

    const double mine = gmstest::literal_agent_objective(inst, dec.x);
    const double best = gmstest::brute_force_agent_best(inst);
    const double scale = std::max({1.0, std::fabs(best), std::fabs(mine)});
    INFO("trial " << trial);
    CHECK(std::fabs(mine - best) <= 1e-9 * scale);
    CHECK(std::fabs(dec.objective - mine) <= 1e-9 * scale);

    // the chosen mask obeys its own constraint set
    uint32_t v = 0;
    for (int t = 0; t < inst.grid.horizon_length; ++t)
      if (dec.x[static_cast<size_t>(t)]) v |= (1u << t);
    CHECK(gmstest::admissible_mask(v, inst.agent, inst.grid.horizon_length));
  }
}
