#include <random>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "uavmc/flightplan.hpp"

using namespace uavmc;

namespace {

std::vector<UavPosition> random_points(std::mt19937_64& rng, std::size_t n, double side) {
  std::uniform_real_distribution<double> u(0.0, side);
  std::vector<UavPosition> pts(n);
  for (auto& p : pts) {
    p.x = u(rng);
    p.y = u(rng);
  }
  return pts;
}

Scenario scenario_with(double period, double speed = 20.0) {
  Scenario s = fixtures::with_users({{0, 0}});
  s.period = period;
  s.speed = speed;
  return s;
}

} // namespace

TEST_CASE("one location needs no flight") {
  const std::vector<UavPosition> pts{{5, 5}};
  const auto tsp = solve_open_tsp(pts);
  CHECK(tsp.order == std::vector<std::size_t>{0});
  CHECK(tsp.distance == 0.0);
  const auto plan = build_flightplan(pts, scenario_with(200.0));
  CHECK(plan.t_fly == 0.0);
  CHECK(plan.segments().empty());
  CHECK(plan.fly_times.empty());
}

TEST_CASE("collinear points are visited monotonically") {
  const std::vector<UavPosition> pts{{300, 10}, {0, 10}, {800, 10}};
  const auto tsp = solve_open_tsp(pts);
  CHECK(tsp.distance == doctest::Approx(800.0).epsilon(1e-15));
  CHECK(tsp.order == std::vector<std::size_t>{1, 0, 2});
  CHECK_FALSE(tsp.heuristic);
}

TEST_CASE("square corners are joined along three sides") {
  const std::vector<UavPosition> pts{{0, 0}, {100, 0}, {100, 100}, {0, 100}};
  const auto tsp = solve_open_tsp(pts);
  CHECK(tsp.distance == doctest::Approx(300.0).epsilon(1e-15));
  CHECK(tsp.order == std::vector<std::size_t>{0, 1, 2, 3});
  const auto plan = build_flightplan(pts, scenario_with(200.0));
  CHECK(plan.t_fly == doctest::Approx(15.0).epsilon(1e-15));
  CHECK(plan.total_distance == doctest::Approx(300.0).epsilon(1e-15));
  CHECK(plan.segments().size() == 3);
}

TEST_CASE("flight time between two locations is distance over speed") {
  const std::vector<UavPosition> pts{{0, 0}, {400, 0}};
  const auto plan = build_flightplan(pts, scenario_with(200.0));
  REQUIRE(plan.fly_times.size() == 1);
  CHECK(plan.fly_times[0] == doctest::Approx(20.0).epsilon(1e-15));
}

TEST_CASE("a period shorter than the flight time is out of scope") {
  const std::vector<UavPosition> pts{{0, 0}, {400, 0}};
  CHECK_THROWS_AS(build_flightplan(pts, scenario_with(19.0)), ScopeError);
  CHECK_NOTHROW(build_flightplan(pts, scenario_with(20.0)));
  CHECK_THROWS_AS(solve_open_tsp(std::vector<UavPosition>{}), std::invalid_argument);
}

TEST_CASE("exact open path equals exhaustive enumeration up to eight points") {
  std::mt19937_64 rng(2024);
  for (std::size_t n = 1; n <= 8; ++n) {
    for (int rep = 0; rep < 6; ++rep) {
      const auto pts = random_points(rng, n, 1000.0);
      const auto tsp = solve_open_tsp(pts);
      const auto brute = oracle::exhaustive_open_path(pts);
      CAPTURE(n);
      CHECK(tsp.order == brute.order);
      CHECK(open_path_length(pts, tsp.order) == oracle::path_length(pts, brute.order));
      CHECK(tsp.distance == doctest::Approx(brute.length).epsilon(1e-13));
    }
  }
}

TEST_CASE("lattice points with many equal-length paths pick the smallest order") {
  std::vector<UavPosition> pts;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 2; ++j) pts.push_back({100.0 * i, 100.0 * j});
  }
  const auto tsp = solve_open_tsp(pts);
  const auto brute = oracle::exhaustive_open_path(pts);
  CHECK(tsp.order == brute.order);
  CHECK(tsp.distance == doctest::Approx(500.0));
}

TEST_CASE("large location sets fall back to a flagged heuristic") {
  std::mt19937_64 rng(5);
  const auto pts = random_points(rng, 14, 1000.0);
  const auto tsp = solve_open_tsp(pts);
  CHECK(tsp.heuristic);
  auto sorted = tsp.order;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) CHECK(sorted[i] == i);
  CHECK(tsp.distance == doctest::Approx(open_path_length(pts, tsp.order)));
  // Twelve points are still exact.
  const auto twelve = random_points(rng, 12, 1000.0);
  CHECK_FALSE(solve_open_tsp(twelve).heuristic);
}

TEST_CASE("schedule alternates hover and flight and covers the period") {
  const std::vector<UavPosition> pts{{0, 0}, {400, 0}};
  const auto s = scenario_with(100.0);
  const auto plan = build_flightplan(pts, s);
  const std::vector<double> hover{30.0, 50.0};
  const auto sched = make_schedule(plan, hover, s.period);
  REQUIRE(sched.sub_periods.size() == 3);
  CHECK(sched.sub_periods[0].end == 30.0);
  CHECK(sched.sub_periods[1].end == 50.0);
  CHECK(sched.sub_periods[2].end == 100.0);
  CHECK(sched.is_hover(0));
  CHECK_FALSE(sched.is_hover(1));

  const auto first = position_at(sched, plan, 10.0);
  CHECK(first == plan.visited(0));
  const auto mid = position_at(sched, plan, 40.0);
  CHECK(mid.x == doctest::Approx(200.0));
  CHECK(mid.y == doctest::Approx(0.0));
  CHECK(position_at(sched, plan, 100.0) == plan.visited(1));
  CHECK(sub_period_at(sched, 30.0) == 0);
  CHECK(sub_period_at(sched, 30.0000001) == 1);
  CHECK_THROWS_AS(position_at(sched, plan, 0.0), std::out_of_range);
  CHECK_THROWS_AS(position_at(sched, plan, 100.5), std::out_of_range);

  const std::vector<double> bad{30.0, 40.0};
  CHECK_THROWS_AS(make_schedule(plan, bad, s.period), std::invalid_argument);
  const std::vector<double> negative{-1.0, 81.0};
  CHECK_THROWS_AS(make_schedule(plan, negative, s.period), std::invalid_argument);
}

TEST_CASE("trajectory samples never exceed the speed limit") {
  const std::vector<UavPosition> pts{{0, 0}, {400, 0}, {400, 300}};
  const auto s = scenario_with(100.0);
  const auto plan = build_flightplan(pts, s);
  const std::vector<double> hover{20.0, 10.0, 100.0 - 35.0 - 30.0};
  const auto sched = make_schedule(plan, hover, s.period);
  std::ostringstream csv;
  write_trajectory_csv(csv, sched, plan, 0.5);
  std::istringstream in(csv.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,x,y");
  double pt = 0.0;
  double px = plan.visited(0).x;
  double py = plan.visited(0).y;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    double t = 0.0;
    double x = 0.0;
    double y = 0.0;
    REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf", &t, &x, &y) == 3);
    if (rows > 0) CHECK(std::hypot(x - px, y - py) / (t - pt) <= s.speed * (1.0 + 1e-6));
    pt = t;
    px = x;
    py = y;
    ++rows;
  }
  CHECK(rows == 200);
  CHECK(pt == 100.0);
}
