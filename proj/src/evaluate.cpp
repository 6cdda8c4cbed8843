#include "uavmc/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace uavmc {

namespace {

// Straight, constant-velocity stretch with constant transmit power.
struct Piece {
  double t0 = 0.0;
  double t1 = 0.0;
  double x0 = 0.0, y0 = 0.0;
  double x1 = 0.0, y1 = 0.0;
  double power = 0.0;
  bool moving() const { return x0 != x1 || y0 != y1; }
};

void locate(const Piece& p, double t, double& x, double& y) {
  const double len = p.t1 - p.t0;
  const double f = len > 0.0 ? std::clamp((t - p.t0) / len, 0.0, 1.0) : 0.0;
  x = p.x0 + (p.x1 - p.x0) * f;
  y = p.y0 + (p.y1 - p.y0) * f;
}

// Own copy of the link model so a solver bug cannot hide behind shared code.
double link_rate(const Scenario& s, std::size_t k, double x, double y, double power) {
  const double dx = x - s.users[k].x;
  const double dy = y - s.users[k].y;
  const double snr = s.beta0 * power / (s.noise_power * (dx * dx + dy * dy + s.altitude * s.altitude));
  return std::log2(1.0 + snr);
}

EvaluationReport integrate(const std::vector<Piece>& pieces, const Scenario& s, double dt,
                           bool check_speed) {
  const std::size_t K = s.num_users();
  EvaluationReport rep;
  rep.per_user_avg_rate.assign(K, 0.0);
  bool negative = false;
  for (const auto& p : pieces) {
    const double len = p.t1 - p.t0;
    if (len < 0.0 || p.power < 0.0) {
      negative = true;
      continue;
    }
    if (len == 0.0) continue;
    rep.energy_used += p.power * len;
    // A hover piece has a constant integrand: one midpoint is exact.
    const auto steps = p.moving() ? static_cast<std::size_t>(std::ceil(len / dt)) : std::size_t{1};
    const double h = len / static_cast<double>(steps);
    for (std::size_t i = 0; i < steps; ++i) {
      double x = 0.0;
      double y = 0.0;
      locate(p, p.t0 + (static_cast<double>(i) + 0.5) * h, x, y);
      for (std::size_t k = 0; k < K; ++k) rep.per_user_avg_rate[k] += h * link_rate(s, k, x, y, p.power);
    }
  }
  for (auto& r : rep.per_user_avg_rate) r /= s.period;
  rep.min_rate = K > 0 ? *std::min_element(rep.per_user_avg_rate.begin(), rep.per_user_avg_rate.end()) : 0.0;

  if (check_speed && !pieces.empty()) {
    const auto samples = static_cast<std::size_t>(std::ceil(s.period / dt));
    std::size_t idx = 0;
    double px = 0.0;
    double py = 0.0;
    locate(pieces.front(), 0.0, px, py);
    double prev_t = 0.0;
    for (std::size_t i = 1; i <= samples; ++i) {
      const double t = std::min(static_cast<double>(i) * dt, s.period);
      while (idx + 1 < pieces.size() && pieces[idx].t1 < t) ++idx;
      double x = 0.0;
      double y = 0.0;
      locate(pieces[idx], t, x, y);
      const double v = std::hypot(x - px, y - py) / (t - prev_t);
      rep.max_speed_observed = std::max(rep.max_speed_observed, v);
      px = x;
      py = y;
      prev_t = t;
    }
    if (rep.max_speed_observed > s.speed * (1.0 + 1e-6)) rep.constraint_flags.push_back(kFlagSpeed);
  }

  const double end = pieces.empty() ? 0.0 : pieces.back().t1;
  if (std::abs(end - s.period) > 1e-9 * s.period) rep.constraint_flags.push_back(kFlagDuration);
  if (negative) rep.constraint_flags.push_back(kFlagNegative);
  if (rep.energy_used > s.period * s.power_ave * (1.0 + 1e-8)) rep.constraint_flags.push_back(kFlagEnergy);
  return rep;
}

void check_common(const Scenario& s, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("integration step dt must be > 0");
  require_valid(s);
}

} // namespace

EvaluationReport evaluate(const HoverPlan& plan, const Scenario& s, double dt) {
  check_common(s, dt);
  if (plan.durations.size() != plan.size() || plan.powers.size() != plan.size() || plan.size() == 0) {
    throw std::invalid_argument("hover plan fields have inconsistent lengths");
  }
  if (!plan.per_user_rate.empty() && plan.per_user_rate.size() != s.num_users()) {
    throw std::invalid_argument("hover plan was built for a different number of users");
  }
  // The relaxed plan has no flight legs, so there is no trajectory to speed-check.
  std::vector<Piece> pieces;
  double t = 0.0;
  for (std::size_t i = 0; i < plan.size(); ++i) {
    const auto& l = plan.locations[i];
    pieces.push_back({t, t + plan.durations[i], l.x, l.y, l.x, l.y, plan.powers[i]});
    t += plan.durations[i];
  }
  return integrate(pieces, s, dt, false);
}

EvaluationReport evaluate(const FlightPlan& route, const AllocationSolution& alloc,
                          const Scenario& s, double dt) {
  check_common(s, dt);
  const std::size_t G = route.size();
  if (G == 0 || route.order.size() != G || alloc.tau_hover.size() != G ||
      alloc.energy_hover.size() != G) {
    throw std::invalid_argument("allocation does not match the number of hover locations");
  }
  if (!alloc.per_user_rate.empty() && alloc.per_user_rate.size() != s.num_users()) {
    throw std::invalid_argument("allocation was built for a different number of users");
  }

  // Flight legs recomputed from the raw coordinates and the speed limit.
  std::vector<double> leg_time(G > 0 ? G - 1 : 0);
  double fly_total = 0.0;
  for (std::size_t i = 0; i + 1 < G; ++i) {
    const auto a = route.hover_locations[route.order[i]];
    const auto b = route.hover_locations[route.order[i + 1]];
    leg_time[i] = std::hypot(b.x - a.x, b.y - a.y) / s.speed;
    fly_total += leg_time[i];
  }
  const std::size_t N = alloc.p_fly.size();
  if (fly_total > 0.0) {
    if (N == 0 || std::abs(static_cast<double>(N) * alloc.delta_t - fly_total) > 1e-9 * std::max(1.0, fly_total)) {
      throw std::invalid_argument("flight slots do not cover the flight time");
    }
  } else if (N != 0) {
    throw std::invalid_argument("flight slots given for a route without flight");
  }

  std::vector<Piece> pieces;
  double t = 0.0;
  double flown = 0.0; // flight-time clock that indexes the slots
  for (std::size_t phi = 0; phi < G; ++phi) {
    const auto here = route.hover_locations[route.order[phi]];
    const double tau = alloc.tau_hover[phi];
    const double p = tau > 0.0 ? alloc.energy_hover[phi] / tau : 0.0;
    pieces.push_back({t, t + tau, here.x, here.y, here.x, here.y, p});
    t += tau;
    if (phi + 1 == G) break;
    const auto next = route.hover_locations[route.order[phi + 1]];
    const double leg = leg_time[phi];
    const double leg_start = flown;
    // Split the leg wherever a slot boundary falls inside it.
    double a = 0.0;
    while (a < leg) {
      const double clock = leg_start + a;
      auto j = static_cast<std::size_t>(std::floor(clock / alloc.delta_t + 1e-12));
      j = std::min(j, N - 1);
      const double slot_end = static_cast<double>(j + 1) * alloc.delta_t - leg_start;
      const double b = (j + 1 == N) ? leg : std::min(leg, slot_end);
      if (b <= a) break;
      const double f0 = a / leg;
      const double f1 = b / leg;
      pieces.push_back({t + a, t + b, here.x + (next.x - here.x) * f0, here.y + (next.y - here.y) * f0,
                        here.x + (next.x - here.x) * f1, here.y + (next.y - here.y) * f1, alloc.p_fly[j]});
      a = b;
    }
    t += leg;
    flown += leg;
  }
  return integrate(pieces, s, dt, true);
}

} // namespace uavmc
