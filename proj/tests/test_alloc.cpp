#include <algorithm>
#include <numeric>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "uavmc/alloc.hpp"
#include "uavmc/relaxed.hpp"

using namespace uavmc;

namespace {

double total(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

struct Route {
  FlightPlan plan;
  DiscretizedFlight flight;
};

Route route_for(const std::vector<UavPosition>& pts, const Scenario& s, double max_slot = 0.5) {
  Route r;
  r.plan = build_flightplan(pts, s);
  r.flight = discretize(r.plan, s, default_slot_count(r.plan.t_fly, max_slot));
  return r;
}

} // namespace

TEST_CASE("slot count keeps every slot at most the cap") {
  CHECK(default_slot_count(0.0) == 0);
  CHECK(default_slot_count(10.0) == 20);
  CHECK(default_slot_count(10.1) == 21);
  CHECK(default_slot_count(15.0, 1.0) == 15);
  CHECK_THROWS_AS(default_slot_count(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("slots are sampled at their midpoints") {
  const Scenario s = fixtures::with_users({{0, 0}, {400, 0}});
  const std::vector<UavPosition> pts{{0, 0}, {400, 0}};
  const auto plan = build_flightplan(pts, s);
  const auto flight = discretize(plan, s, 4);
  REQUIRE(flight.slots == 4);
  CHECK(flight.delta_t == doctest::Approx(5.0));
  const double xs[] = {50.0, 150.0, 250.0, 350.0};
  for (std::size_t j = 0; j < 4; ++j) {
    CHECK(flight.slot_positions[j].x == doctest::Approx(xs[j]).epsilon(1e-14));
    CHECK(flight.slot_positions[j].y == 0.0);
  }
  // Gain of a user directly below its own hover location: gamma0 / H^2.
  CHECK(flight.alpha_hover[0][0] == doctest::Approx(10.0).epsilon(1e-14));
  CHECK(flight.alpha_hover[1][1] == doctest::Approx(10.0).epsilon(1e-14));
  CHECK(flight.alpha_slot[0][0] == doctest::Approx(1e5 / (2500.0 + 1e4)).epsilon(1e-14));
  CHECK_THROWS_AS(discretize(plan, s, 0), std::invalid_argument);
}

TEST_CASE("no flight means no slots") {
  const Scenario s = fixtures::with_users({{0, 0}});
  const std::vector<UavPosition> pts{{0, 0}};
  const auto flight = discretize(build_flightplan(pts, s), s, 0);
  CHECK(flight.slots == 0);
  CHECK(flight.slot_positions.empty());
}

TEST_CASE("single hover without flight keeps the average power") {
  const Scenario s = fixtures::with_users({{0, 0}, {50, 0}});
  const auto r = route_for({{25, 0}}, s);
  const auto sol = optimize_joint(r.flight, r.plan, s);
  CHECK(sol.converged);
  CHECK(sol.tau_hover[0] == doctest::Approx(s.period).epsilon(1e-12));
  CHECK(sol.p_hover[0] == doctest::Approx(s.power_ave).epsilon(1e-8));
  CHECK(sol.eta == doctest::Approx(min_rate({25, 0}, s.power_ave, s)).epsilon(1e-8));
}

TEST_CASE("period equal to the flight time leaves no hover time") {
  Scenario s = fixtures::with_users({{0, 0}, {400, 0}, {200, 150}});
  const std::vector<UavPosition> pts{{0, 0}, {400, 0}};
  s.period = 20.0;
  const auto r = route_for(pts, s);
  const auto sol = optimize_joint(r.flight, r.plan, s);
  CHECK(sol.converged);
  for (double t : sol.tau_hover) CHECK(t == 0.0);
  CHECK(allocation_energy(sol) == doctest::Approx(s.period * s.power_ave).epsilon(1e-8));
  const auto eq = benchmark_equal_power(r.plan, r.flight, s);
  CHECK(sol.eta >= eq.eta * (1.0 - 1e-9));
}

TEST_CASE("mirrored users and hovers give a mirrored allocation") {
  const Scenario s = fixtures::with_users({{-300, 0}, {300, 0}});
  const auto r = route_for({{-300, 0}, {300, 0}}, s);
  const auto sol = optimize_joint(r.flight, r.plan, s);
  CHECK(sol.converged);
  CHECK(sol.tau_hover[0] == doctest::Approx(sol.tau_hover[1]).epsilon(1e-7));
  CHECK(sol.energy_hover[0] == doctest::Approx(sol.energy_hover[1]).epsilon(1e-7));
  const std::size_t N = sol.p_fly.size();
  for (std::size_t j = 0; j < N; ++j) CHECK(sol.p_fly[j] == doctest::Approx(sol.p_fly[N - 1 - j]).epsilon(1e-6));
  CHECK(sol.per_user_rate[0] == doctest::Approx(sol.per_user_rate[1]).epsilon(1e-8));

  // The same program with the users listed the other way round.
  const Scenario swapped = fixtures::with_users({{300, 0}, {-300, 0}});
  const auto r2 = route_for({{300, 0}, {-300, 0}}, swapped);
  const auto sol2 = optimize_joint(r2.flight, r2.plan, swapped);
  CHECK(sol2.eta == doctest::Approx(sol.eta).epsilon(1e-8));

  const auto eq = benchmark_equal_power(r.plan, r.flight, s);
  CHECK(eq.tau_hover[0] == doctest::Approx(eq.tau_hover[1]).epsilon(1e-9));
}

TEST_CASE("joint allocation spends the whole budget and respects the duration total") {
  const Scenario s = fixtures::golden("golden_k4_s21.json");
  const auto hover = solve_p2(s);
  const auto r = route_for(hover.locations, s);
  const auto sol = optimize_joint(r.flight, r.plan, s);
  CHECK(sol.converged);
  CHECK(sol.kkt_residual <= 1e-9);
  CHECK(allocation_energy(sol) <= s.period * s.power_ave * (1.0 + 1e-8));
  CHECK(allocation_energy(sol) == doctest::Approx(s.period * s.power_ave).epsilon(1e-6));
  CHECK(total(sol.tau_hover) == doctest::Approx(s.period - r.plan.t_fly).epsilon(1e-12));
  for (double p : sol.p_fly) CHECK(p >= 0.0);
  const auto rates = allocation_rates(sol, r.flight, s);
  CHECK(sol.eta == doctest::Approx(*std::min_element(rates.begin(), rates.end())).epsilon(1e-14));

  // Ordering against both benchmarks and the relaxed bound.
  const auto eq = benchmark_equal_power(r.plan, r.flight, s);
  const auto st = benchmark_static(s);
  CHECK(st.eta <= eq.eta + 1e-7);
  CHECK(eq.eta <= sol.eta + 1e-7);
  CHECK(sol.eta <= hover.eta_star + 1e-7);
}

TEST_CASE("joint allocation matches its frozen value and converges in the slot count") {
  Scenario s = fixtures::golden("golden_k4_s21.json");
  const auto hover = solve_p2(s);
  const double t_fly = solve_open_tsp(hover.locations).distance / s.speed;
  s.period = 2.0 * t_fly;
  const auto r = route_for(hover.locations, s);
  const auto sol = optimize_joint(r.flight, r.plan, s);
  CHECK(sol.eta == doctest::Approx(2.1850144362).epsilon(1e-6));

  const auto fine = discretize(r.plan, s, 2 * r.flight.slots);
  const auto sol2 = optimize_joint(fine, r.plan, s);
  CHECK(std::abs(sol2.eta - sol.eta) <= 1e-3 * sol.eta);
}

TEST_CASE("zero budget gives the silent schedule") {
  Scenario s = fixtures::with_users({{0, 0}, {400, 0}});
  s.power_ave = 0.0;
  const auto r = route_for({{0, 0}, {400, 0}}, s);
  const auto sol = optimize_joint(r.flight, r.plan, s);
  CHECK(sol.eta == 0.0);
  CHECK(allocation_energy(sol) == 0.0);
  CHECK(total(sol.tau_hover) == doctest::Approx(s.period - r.plan.t_fly));
}

TEST_CASE("allocation refuses periods shorter than the flight") {
  Scenario s = fixtures::with_users({{0, 0}, {400, 0}});
  const auto r = route_for({{0, 0}, {400, 0}}, s);
  s.period = 10.0;
  CHECK_THROWS_AS(optimize_joint(r.flight, r.plan, s), ScopeError);
  CHECK_THROWS_AS(benchmark_equal_power(r.plan, r.flight, s), ScopeError);
}

TEST_CASE("static benchmark examples") {
  const auto one = benchmark_static(fixtures::with_users({{250, -40}}));
  CHECK(one.position.x == 250.0);
  CHECK(one.position.y == -40.0);
  CHECK(one.eta == doctest::Approx(std::log2(11.0)).epsilon(1e-12));

  const auto pair = benchmark_static(fixtures::with_users({{-500, 0}, {500, 0}}));
  CHECK(pair.position.y == 0.0);
  CHECK(std::abs(pair.position.x) <= 1000.0 / 63.0 / 256.0);
  CHECK(pair.eta == doctest::Approx(0.4695).epsilon(1e-4));
  CHECK(pair.eta <= std::log2(1.0 + 1e5 / 260000.0) + 1e-15);
}

TEST_CASE("constant power beats random power profiles at a fixed hover point") {
  const Scenario s = fixtures::golden("golden_k4_s21.json");
  const auto st = benchmark_static(s);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    // Piecewise-constant power on 20 equal pieces with mean P_ave.
    std::vector<double> p(20);
    for (auto& v : p) v = u(rng);
    const double mean = total(p) / 20.0;
    for (auto& v : p) v *= s.power_ave / mean;
    std::vector<double> r(s.num_users(), 0.0);
    for (double v : p) {
      for (std::size_t k = 0; k < r.size(); ++k) r[k] += rate(st.position, v, k, s) / 20.0;
    }
    CHECK(*std::min_element(r.begin(), r.end()) <= st.eta + 1e-12);
  }
}

TEST_CASE("equal-power benchmark with one hover equals the static value there") {
  const Scenario s = fixtures::with_users({{-100, 0}, {100, 30}, {0, 90}});
  const auto r = route_for({{10, 20}}, s);
  const auto eq = benchmark_equal_power(r.plan, r.flight, s);
  CHECK(eq.eta == doctest::Approx(min_rate({10, 20}, s.power_ave, s)).epsilon(1e-12));
  CHECK(eq.p_hover[0] == doctest::Approx(s.power_ave));
}
