#include <algorithm>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "uavmc/perspective_program.hpp"

using namespace uavmc;

namespace {

PerspectiveProblem random_problem(std::mt19937_64& rng, std::size_t K, std::size_t H, std::size_t J,
                                  double hover_fraction) {
  std::uniform_real_distribution<double> snr(0.05, 12.0);
  PerspectiveProblem pb;
  pb.users = K;
  pb.hover_fraction = hover_fraction;
  pb.slot_fraction = J > 0 ? (1.0 - hover_fraction) / static_cast<double>(J) : 0.0;
  pb.hover_snr.assign(K, std::vector<double>(H));
  pb.slot_snr.assign(K, std::vector<double>(J));
  for (std::size_t k = 0; k < K; ++k) {
    for (auto& a : pb.hover_snr[k]) a = snr(rng);
    for (auto& b : pb.slot_snr[k]) b = snr(rng);
  }
  return pb;
}

double independent_kkt(const PerspectiveProblem& pb, const PerspectiveSolution& s) {
  return oracle::joint_kkt_residual(pb, s.u, s.v, s.q, s.eta, s.weights, s.energy_price, s.duration_price);
}

} // namespace

TEST_CASE("perspective term is midpoint concave on random pairs") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> tau(0.0, 10.0);
  std::uniform_real_distribution<double> energy(0.0, 20.0);
  std::uniform_real_distribution<double> alpha(1e-3, 50.0);
  PerspectiveProblem pb;
  pb.users = 1;
  pb.hover_snr = {{0.0}};
  pb.slot_snr = {{}};
  for (int i = 0; i < 10000; ++i) {
    pb.hover_snr[0][0] = alpha(rng);
    const double t1 = tau(rng), e1 = energy(rng), t2 = tau(rng), e2 = energy(rng);
    const auto f = [&](double t, double e) { return perspective_rates(pb, {t}, {e}, {})[0]; };
    const double mid = f(0.5 * (t1 + t2), 0.5 * (e1 + e2));
    CHECK(mid >= 0.5 * (f(t1, e1) + f(t2, e2)) - 1e-10);
  }
}

TEST_CASE("objective rows match an independent evaluation") {
  std::mt19937_64 rng(3);
  const auto pb = random_problem(rng, 4, 3, 5, 0.6);
  const std::vector<double> u{0.2, 0.0, 0.4};
  const std::vector<double> v{0.1, 0.0, 0.5};
  const std::vector<double> q{0.3, 0.0, 1.0, 2.0, 0.7};
  const auto r = perspective_rates(pb, u, v, q);
  for (std::size_t k = 0; k < 4; ++k) {
    double expect = 0.0;
    for (std::size_t h = 0; h < 3; ++h) expect += oracle::perspective(u[h], v[h], pb.hover_snr[k][h]);
    for (std::size_t j = 0; j < 5; ++j) expect += pb.slot_fraction * std::log2(1.0 + pb.slot_snr[k][j] * q[j]);
    CHECK(r[k] == doctest::Approx(expect).epsilon(1e-14));
  }
}

TEST_CASE("random joint programs satisfy an independent KKT check") {
  std::mt19937_64 rng(17);
  const std::size_t shapes[][3] = {{1, 1, 0}, {2, 2, 4}, {3, 1, 8}, {5, 4, 20}, {10, 6, 60}, {10, 9, 200}};
  for (const auto& shape : shapes) {
    for (int rep = 0; rep < 4; ++rep) {
      const auto pb = random_problem(rng, shape[0], shape[1], shape[2], shape[2] > 0 ? 0.7 : 1.0);
      const auto sol = solve_perspective_program(pb);
      CAPTURE(shape[0]);
      CAPTURE(shape[1]);
      CAPTURE(shape[2]);
      CHECK(sol.converged);
      CHECK(sol.kkt_residual <= 1e-9);
      CHECK(independent_kkt(pb, sol) <= 1e-8);
      const auto rates = perspective_rates(pb, sol.u, sol.v, sol.q);
      CHECK(sol.eta == doctest::Approx(*std::min_element(rates.begin(), rates.end())).epsilon(1e-8));
    }
  }
}

TEST_CASE("flight-only program spreads energy over the slots") {
  std::mt19937_64 rng(8);
  auto pb = random_problem(rng, 3, 2, 10, 0.0);
  pb.slot_fraction = 0.1;
  const auto sol = solve_perspective_program(pb);
  CHECK(sol.converged);
  for (std::size_t h = 0; h < 2; ++h) {
    CHECK(sol.u[h] == 0.0);
    CHECK(sol.v[h] == 0.0);
  }
  double energy = 0.0;
  for (double q : sol.q) energy += pb.slot_fraction * q;
  CHECK(energy == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(independent_kkt(pb, sol) <= 1e-8);
}

TEST_CASE("a hover useless to every user is left idle with a certificate") {
  PerspectiveProblem pb;
  pb.users = 2;
  pb.hover_fraction = 1.0;
  pb.hover_snr = {{10.0, 0.5, 1e-4}, {0.5, 10.0, 1e-4}};
  pb.slot_snr = {{}, {}};
  const auto sol = solve_perspective_program(pb);
  CHECK(sol.converged);
  CHECK(sol.u[2] < 1e-9);
  CHECK(sol.u[0] == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(sol.u[1] == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(sol.v[0] == doctest::Approx(sol.v[1]).epsilon(1e-8));
  CHECK(independent_kkt(pb, sol) <= 1e-8);
}

TEST_CASE("a single hover with no flight takes the whole budget") {
  PerspectiveProblem pb;
  pb.users = 2;
  pb.hover_fraction = 1.0;
  pb.hover_snr = {{10.0}, {4.0}};
  pb.slot_snr = {{}, {}};
  const auto sol = solve_perspective_program(pb);
  CHECK(sol.u[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sol.v[0] == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(sol.eta == doctest::Approx(std::log2(5.0)).epsilon(1e-8));
}

TEST_CASE("users with identical gains share one weight and converge") {
  PerspectiveProblem pb;
  pb.users = 3;
  pb.hover_fraction = 0.6;
  pb.slot_fraction = 0.1;
  pb.hover_snr = {{9.0, 0.3}, {9.0, 0.3}, {0.4, 7.0}};
  pb.slot_snr = {{1, 2, 3, 4}, {1, 2, 3, 4}, {4, 3, 2, 1}};
  const auto sol = solve_perspective_program(pb);
  CHECK(sol.converged);
  CHECK(sol.weights[0] == doctest::Approx(sol.weights[1]).epsilon(1e-12));
  CHECK(independent_kkt(pb, sol) <= 1e-8);
}

TEST_CASE("duplicate users are handled when the slot rows are omitted") {
  PerspectiveProblem pb;
  pb.users = 3;
  pb.hover_fraction = 1.0;
  pb.hover_snr = {{5.0, 1.0}, {5.0, 1.0}, {1.0, 5.0}};
  const auto sol = solve_perspective_program(pb);
  CHECK(sol.converged);
  CHECK(sol.u[0] == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(sol.weights[0] == doctest::Approx(sol.weights[1]).epsilon(1e-12));
}
