#include "uavmc/flightplan.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <ostream>

namespace uavmc {

namespace {

double distance(UavPosition a, UavPosition b) { return std::hypot(a.x - b.x, a.y - b.y); }

// Relative slack used when comparing path lengths that differ only by rounding.
constexpr double kTieSlack = 1e-12;

bool shorter(double candidate, double incumbent) {
  return candidate < incumbent - kTieSlack * std::max(1.0, std::abs(incumbent));
}

TspResult exact_open_path(std::span<const UavPosition> pts) {
  const std::size_t n = pts.size();
  // Node n is the dummy: zero distance to everything, so a closed tour through
  // it is an open path through the real nodes.
  const std::size_t dummy = n;
  std::vector<std::vector<double>> d(n + 1, std::vector<double>(n + 1, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) d[i][j] = distance(pts[i], pts[j]);
  }

  // tail[S][v]: shortest way to leave the dummy's successor v, visit every
  // node of S (v in S) and return to the dummy. Suffix form makes the
  // lexicographically smallest reconstruction a greedy walk.
  const std::size_t full = (std::size_t{1} << n) - 1;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> tail((full + 1) * n, inf);
  auto at = [&](std::size_t set, std::size_t v) -> double& { return tail[set * n + v]; };
  for (std::size_t v = 0; v < n; ++v) at(std::size_t{1} << v, v) = d[v][dummy];
  for (std::size_t set = 1; set <= full; ++set) {
    if ((set & (set - 1)) == 0) continue;
    for (std::size_t v = 0; v < n; ++v) {
      if (!(set >> v & 1U)) continue;
      const std::size_t rest = set & ~(std::size_t{1} << v);
      double best = inf;
      for (std::size_t u = 0; u < n; ++u) {
        if (rest >> u & 1U) best = std::min(best, d[v][u] + at(rest, u));
      }
      at(set, v) = best;
    }
  }

  double best = inf;
  for (std::size_t v = 0; v < n; ++v) best = std::min(best, d[dummy][v] + at(full, v));

  TspResult out;
  std::size_t set = full;
  std::size_t prev = dummy;
  double budget = best;
  while (set != 0) {
    for (std::size_t v = 0; v < n; ++v) {
      if (!(set >> v & 1U)) continue;
      const double through = d[prev][v] + at(set, v);
      if (!shorter(budget, through)) {
        out.order.push_back(v);
        budget = at(set, v);
        set &= ~(std::size_t{1} << v);
        prev = v;
        break;
      }
    }
  }
  out.distance = open_path_length(pts, out.order);
  return out;
}

TspResult heuristic_open_path(std::span<const UavPosition> pts) {
  const std::size_t n = pts.size();
  TspResult best;
  best.distance = std::numeric_limits<double>::infinity();
  for (std::size_t start = 0; start < n; ++start) {
    std::vector<std::size_t> order{start};
    std::vector<bool> used(n, false);
    used[start] = true;
    while (order.size() < n) {
      std::size_t next = n;
      double nd = std::numeric_limits<double>::infinity();
      for (std::size_t v = 0; v < n; ++v) {
        if (used[v]) continue;
        const double dv = distance(pts[order.back()], pts[v]);
        if (dv < nd) {
          nd = dv;
          next = v;
        }
      }
      used[next] = true;
      order.push_back(next);
    }
    // 2-opt on the open path: reversing order[i..j] changes at most two edges.
    for (std::size_t pass = 0; pass < 100; ++pass) {
      bool improved = false;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
          double before = 0.0;
          double after = 0.0;
          if (i > 0) {
            before += distance(pts[order[i - 1]], pts[order[i]]);
            after += distance(pts[order[i - 1]], pts[order[j]]);
          }
          if (j + 1 < n) {
            before += distance(pts[order[j]], pts[order[j + 1]]);
            after += distance(pts[order[i]], pts[order[j + 1]]);
          }
          if (shorter(after, before)) {
            std::reverse(order.begin() + static_cast<std::ptrdiff_t>(i),
                         order.begin() + static_cast<std::ptrdiff_t>(j) + 1);
            improved = true;
          }
        }
      }
      if (!improved) break;
    }
    if (order.front() > order.back()) std::reverse(order.begin(), order.end());
    const double len = open_path_length(pts, order);
    if (best.order.empty() || shorter(len, best.distance) ||
        (!shorter(best.distance, len) && order < best.order)) {
      best.order = order;
      best.distance = len;
    }
  }
  best.heuristic = true;
  return best;
}

} // namespace

double open_path_length(std::span<const UavPosition> points, std::span<const std::size_t> order) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < order.size(); ++i) {
    total += distance(points[order[i]], points[order[i + 1]]);
  }
  return total;
}

TspResult solve_open_tsp(std::span<const UavPosition> points) {
  if (points.empty()) throw std::invalid_argument("open path needs at least one location");
  if (points.size() == 1) return {{0}, 0.0, false};
  if (points.size() <= kExactTspLimit) return exact_open_path(points);
  return heuristic_open_path(points);
}

std::vector<FlightSegment> FlightPlan::segments() const {
  std::vector<FlightSegment> out;
  for (std::size_t phi = 0; phi + 1 < order.size(); ++phi) {
    out.push_back({visited(phi), visited(phi + 1), distances[order[phi]][order[phi + 1]],
                   fly_times[phi]});
  }
  return out;
}

FlightPlan build_flightplan(std::span<const UavPosition> hover_locations, const Scenario& scenario) {
  require_valid(scenario);
  const auto tsp = solve_open_tsp(hover_locations);
  FlightPlan plan;
  plan.hover_locations.assign(hover_locations.begin(), hover_locations.end());
  plan.order = tsp.order;
  plan.heuristic = tsp.heuristic;
  plan.speed = scenario.speed;
  const std::size_t n = hover_locations.size();
  plan.distances.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      plan.distances[i][j] = distance(hover_locations[i], hover_locations[j]);
    }
  }
  for (std::size_t phi = 0; phi + 1 < n; ++phi) {
    const double len = plan.distances[plan.order[phi]][plan.order[phi + 1]];
    plan.total_distance += len;
    plan.fly_times.push_back(len / scenario.speed);
  }
  plan.t_fly = plan.total_distance / scenario.speed;
  if (scenario.period < plan.t_fly) {
    throw ScopeError("period T = " + std::to_string(scenario.period) +
                     " s is shorter than the flight time T_fly = " + std::to_string(plan.t_fly) +
                     " s; periods below T_fly are not supported");
  }
  return plan;
}

Schedule make_schedule(const FlightPlan& plan, std::span<const double> hover_durations,
                       double period) {
  if (hover_durations.size() != plan.size()) {
    throw std::invalid_argument("schedule needs one hover duration per location");
  }
  double sum = 0.0;
  for (double d : hover_durations) {
    if (!(d >= 0.0)) throw std::invalid_argument("hover durations must be >= 0");
    sum += d;
  }
  if (std::abs(sum - (period - plan.t_fly)) > 1e-9 * period) {
    throw std::invalid_argument("hover durations must sum to T - T_fly");
  }
  Schedule s;
  s.period = period;
  s.hover_durations.assign(hover_durations.begin(), hover_durations.end());
  double t = 0.0;
  for (std::size_t phi = 0; phi < plan.size(); ++phi) {
    s.sub_periods.push_back({t, t + hover_durations[phi]});
    t += hover_durations[phi];
    if (phi + 1 < plan.size()) {
      s.sub_periods.push_back({t, t + plan.fly_times[phi]});
      t += plan.fly_times[phi];
    }
  }
  s.sub_periods.back().end = period;
  return s;
}

std::size_t sub_period_at(const Schedule& schedule, double t) {
  if (!(t > 0.0 && t <= schedule.period)) throw std::out_of_range("time outside (0, T]");
  const auto it = std::lower_bound(schedule.sub_periods.begin(), schedule.sub_periods.end(), t,
                                   [](const Interval& iv, double v) { return iv.end < v; });
  if (it == schedule.sub_periods.end()) return schedule.sub_periods.size() - 1;
  return static_cast<std::size_t>(it - schedule.sub_periods.begin());
}

UavPosition position_at(const Schedule& schedule, const FlightPlan& plan, double t) {
  const std::size_t idx = sub_period_at(schedule, t);
  const std::size_t phi = idx / 2;
  if (schedule.is_hover(idx)) return plan.visited(phi);
  const Interval& iv = schedule.sub_periods[idx];
  const UavPosition a = plan.visited(phi);
  const UavPosition b = plan.visited(phi + 1);
  const double len = iv.end - iv.begin;
  const double f = len > 0.0 ? std::clamp((t - iv.begin) / len, 0.0, 1.0) : 1.0;
  return {std::lerp(a.x, b.x, f), std::lerp(a.y, b.y, f)};
}

void write_trajectory_csv(std::ostream& out, const Schedule& schedule, const FlightPlan& plan,
                          double step) {
  if (!(step > 0.0)) throw std::invalid_argument("sampling step must be > 0");
  out << "t,x,y\n";
  const auto count = static_cast<std::uint64_t>(std::ceil(schedule.period / step - 1e-9));
  for (std::uint64_t i = 1; i <= count; ++i) {
    const double t = std::min(static_cast<double>(i) * step, schedule.period);
    const auto p = position_at(schedule, plan, t);
    out << t << ',' << p.x << ',' << p.y << '\n';
  }
}

} // namespace uavmc
