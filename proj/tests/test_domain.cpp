#include <catch2/catch_amalgamated.hpp>

#include "gms/domain.hpp"
#include "support/fixtures.hpp"

using namespace gms;

TEST_CASE("sign is the three-valued step") {
  CHECK(sign(3.2) == 1);
  CHECK(sign(0.0) == 0);
  CHECK(sign(-7.0) == -1);
}

TEST_CASE("sign is odd") {
  for (double v : {-12.5, -1e-9, 0.0, 0.25, 4.0, 1e12})
    CHECK(sign(-v) == -sign(v));
}

TEST_CASE("validate_inputs passes a small well-formed system") {
  auto [agents, net] = gmstest::two_unit_system(40, 8.0);  // either unit can cover it
  TimeGrid grid{40};
  auto rep = validate_inputs(agents, net, grid);
  CHECK(rep.structural_ok);
  CHECK(rep.assumption_adequacy_ok);
  // margin: earliest failure 20-4*2=12 days after day 0 vs N*max_r = 4
  CHECK(rep.assumption_spacing_ok);
  CHECK(rep.all_ok());
}

TEST_CASE("adequacy flag trips when the fleet minus its largest unit is short") {
  auto [agents, net] = gmstest::two_unit_system(40, 15.0);  // caps {10,10}, peak 15
  TimeGrid grid{40};
  auto rep = validate_inputs(agents, net, grid);
  CHECK(rep.structural_ok);
  CHECK_FALSE(rep.assumption_adequacy_ok);
  CHECK_FALSE(rep.all_ok());
}

TEST_CASE("spacing flag trips when failure windows are too tight") {
  auto [agents, net] = gmstest::two_unit_system();
  // Both failures one day after detection, zero spread, r=1 each: margin 1 < 2.
  for (auto& a : agents) {
    a.repair_time = 1;
    a.events = {{10, 11.0, 0.0, 1, 20}};
  }
  TimeGrid grid{40};
  auto rep = validate_inputs(agents, net, grid);
  CHECK(rep.structural_ok);
  CHECK_FALSE(rep.assumption_spacing_ok);
}

TEST_CASE("validate_inputs hard errors") {
  TimeGrid grid{40};

  SECTION("negative capacity") {
    auto [agents, net] = gmstest::two_unit_system();
    net.lines[0].capacity = -5.0;
    CHECK_THROWS_AS(validate_inputs(agents, net, grid), ValidationError);
  }
  SECTION("disconnected graph") {
    auto [agents, net] = gmstest::two_unit_system();
    net.lines.clear();
    CHECK_THROWS_AS(validate_inputs(agents, net, grid), ValidationError);
  }
  SECTION("line to unknown bus") {
    auto [agents, net] = gmstest::two_unit_system();
    net.lines.push_back({1, 7, 10.0, 100.0});
    CHECK_THROWS_AS(validate_inputs(agents, net, grid), ValidationError);
  }
  SECTION("event window outside grid") {
    auto [agents, net] = gmstest::two_unit_system();
    agents[0].events[0].window_end = 99;
    CHECK_THROWS_AS(validate_inputs(agents, net, grid), ValidationError);
  }
  SECTION("overlapping event windows") {
    auto [agents, net] = gmstest::two_unit_system();
    agents[0].events = {{5, 20.0, 2.0, 1, 30}, {25, 35.0, 1.0, 28, 40}};
    CHECK_THROWS_AS(validate_inputs(agents, net, grid), ValidationError);
  }
  SECTION("detection after mean failure") {
    auto [agents, net] = gmstest::two_unit_system();
    agents[0].events[0].rul_mean = 4.0;  // detect_time is 5
    CHECK_THROWS_AS(validate_inputs(agents, net, grid), ValidationError);
  }
}

TEST_CASE("bus lookup") {
  auto [agents, net] = gmstest::two_unit_system();
  (void)agents;
  CHECK(net.bus_index(1) == 0);
  CHECK(net.bus_index(2) == 1);
  CHECK_THROWS_AS(net.bus_index(3), ValidationError);
  CHECK(net.load_at(1, 1) == Catch::Approx(6.0));
}
