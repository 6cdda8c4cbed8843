#include "uavmc/alloc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "uavmc/lp.hpp"

namespace uavmc {

namespace {

double gain(UavPosition pos, std::size_t k, const Scenario& s) {
  return s.gamma0() / squared_distance(pos, k, s);
}

// Point at flight-time offset t along the concatenated segments.
UavPosition along_route(const FlightPlan& plan, double t) {
  const auto segs = plan.segments();
  double start = 0.0;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const double end = start + segs[i].duration;
    if (t <= end || i + 1 == segs.size()) {
      const double f = segs[i].duration > 0.0 ? std::clamp((t - start) / segs[i].duration, 0.0, 1.0) : 1.0;
      return {std::lerp(segs[i].from.x, segs[i].to.x, f), std::lerp(segs[i].from.y, segs[i].to.y, f)};
    }
    start = end;
  }
  return plan.visited(0);
}

void finish(AllocationSolution& sol, const DiscretizedFlight& flight, const Scenario& s) {
  sol.delta_t = flight.delta_t;
  sol.p_hover.resize(sol.tau_hover.size());
  for (std::size_t i = 0; i < sol.tau_hover.size(); ++i) {
    sol.p_hover[i] = sol.tau_hover[i] > 0.0 ? sol.energy_hover[i] / sol.tau_hover[i] : 0.0;
  }
  sol.per_user_rate = allocation_rates(sol, flight, s);
  sol.eta = *std::min_element(sol.per_user_rate.begin(), sol.per_user_rate.end());
}

} // namespace

std::size_t default_slot_count(double t_fly, double max_slot) {
  if (!(max_slot > 0.0)) throw std::invalid_argument("slot length cap must be > 0");
  if (t_fly <= 0.0) return 0;
  return static_cast<std::size_t>(std::ceil(t_fly / max_slot));
}

DiscretizedFlight discretize(const FlightPlan& plan, const Scenario& scenario, std::size_t slots) {
  const std::size_t K = scenario.num_users();
  DiscretizedFlight out;
  out.alpha_hover.assign(K, std::vector<double>(plan.size()));
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t phi = 0; phi < plan.size(); ++phi) {
      out.alpha_hover[k][phi] = gain(plan.visited(phi), k, scenario);
    }
  }
  out.alpha_slot.assign(K, {});
  if (plan.t_fly <= 0.0) return out;
  if (slots == 0) throw std::invalid_argument("flight needs at least one slot");
  out.slots = slots;
  out.delta_t = plan.t_fly / static_cast<double>(slots);
  for (std::size_t j = 0; j < slots; ++j) {
    out.slot_positions.push_back(along_route(plan, (static_cast<double>(j) + 0.5) * out.delta_t));
  }
  for (std::size_t k = 0; k < K; ++k) {
    out.alpha_slot[k].resize(slots);
    for (std::size_t j = 0; j < slots; ++j) {
      out.alpha_slot[k][j] = gain(out.slot_positions[j], k, scenario);
    }
  }
  return out;
}

std::vector<double> allocation_rates(const AllocationSolution& sol, const DiscretizedFlight& flight,
                                     const Scenario& s) {
  std::vector<double> r(s.num_users(), 0.0);
  for (std::size_t k = 0; k < r.size(); ++k) {
    double acc = 0.0;
    for (std::size_t phi = 0; phi < sol.tau_hover.size(); ++phi) {
      const double tau = sol.tau_hover[phi];
      if (tau > 0.0) acc += tau * log2_1p(flight.alpha_hover[k][phi] * sol.energy_hover[phi] / tau);
    }
    for (std::size_t j = 0; j < sol.p_fly.size(); ++j) {
      acc += flight.delta_t * log2_1p(flight.alpha_slot[k][j] * sol.p_fly[j]);
    }
    r[k] = acc / s.period;
  }
  return r;
}

double allocation_energy(const AllocationSolution& sol) {
  double e = 0.0;
  for (double v : sol.energy_hover) e += v;
  for (double p : sol.p_fly) e += sol.delta_t * p;
  return e;
}

AllocationSolution optimize_joint(const DiscretizedFlight& flight, const FlightPlan& plan,
                                  const Scenario& s, const InteriorPointConfig& config) {
  require_valid(s);
  if (s.period < plan.t_fly) throw ScopeError("period is shorter than the flight time");
  const std::size_t K = s.num_users();
  const std::size_t G = plan.size();
  AllocationSolution sol;
  sol.tau_hover.assign(G, 0.0);
  sol.energy_hover.assign(G, 0.0);
  sol.p_fly.assign(flight.slots, 0.0);
  if (!(s.power_ave > 0.0)) {
    // Only the silent schedule fits a zero budget.
    sol.tau_hover[0] = s.period - plan.t_fly;
    finish(sol, flight, s);
    return sol;
  }

  const double hover_time = s.period - plan.t_fly;
  PerspectiveProblem pb;
  pb.users = K;
  // A hover share below rounding level is treated as none at all.
  pb.hover_fraction = hover_time > 1e-12 * s.period ? hover_time / s.period : 0.0;
  pb.slot_fraction = flight.delta_t / s.period;
  pb.hover_snr.assign(K, std::vector<double>(G));
  pb.slot_snr.assign(K, std::vector<double>(flight.slots));
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t phi = 0; phi < G; ++phi) pb.hover_snr[k][phi] = flight.alpha_hover[k][phi] * s.power_ave;
    for (std::size_t j = 0; j < flight.slots; ++j) pb.slot_snr[k][j] = flight.alpha_slot[k][j] * s.power_ave;
  }
  const auto res = solve_perspective_program(pb, config);

  for (std::size_t phi = 0; phi < G; ++phi) {
    sol.tau_hover[phi] = res.u[phi] * s.period;
    sol.energy_hover[phi] = res.v[phi] * s.period * s.power_ave;
  }
  for (std::size_t j = 0; j < flight.slots; ++j) sol.p_fly[j] = res.q[j] * s.power_ave;

  // Interior-point iterates keep unused hovers at a sliver of time; hand that
  // time to the longest hover so the schedule has no degenerate stops.
  if (pb.hover_fraction > 0.0) {
    const auto longest = static_cast<std::size_t>(
        std::max_element(sol.tau_hover.begin(), sol.tau_hover.end()) - sol.tau_hover.begin());
    double freed = 0.0;
    for (std::size_t phi = 0; phi < G; ++phi) {
      if (phi != longest && sol.tau_hover[phi] < 1e-9 * s.period) {
        freed += sol.tau_hover[phi];
        sol.energy_hover[longest] += sol.energy_hover[phi];
        sol.tau_hover[phi] = 0.0;
        sol.energy_hover[phi] = 0.0;
      }
    }
    sol.tau_hover[longest] += freed;
    // Exact duration total after the transfer.
    double other = 0.0;
    for (std::size_t phi = 0; phi < G; ++phi) {
      if (phi != longest) other += sol.tau_hover[phi];
    }
    sol.tau_hover[longest] = std::max(0.0, hover_time - other);
  } else {
    sol.tau_hover.assign(G, 0.0);
    sol.energy_hover.assign(G, 0.0);
  }
  sol.kkt_residual = res.kkt_residual;
  sol.converged = res.converged;
  finish(sol, flight, s);
  return sol;
}

StaticResult benchmark_static(const Scenario& s, const GridSpec& grid) {
  require_valid(s);
  const auto search = grid_maximize(user_bounding_box(s), grid, [&](double x, double y) {
    return min_rate({x, y}, s.power_ave, s);
  });
  const auto& best = search.peaks.front();
  return {{best.x, best.y}, min_rate({best.x, best.y}, s.power_ave, s)};
}

AllocationSolution benchmark_equal_power(const FlightPlan& plan, const DiscretizedFlight& flight,
                                         const Scenario& s) {
  require_valid(s);
  if (s.period < plan.t_fly) throw ScopeError("period is shorter than the flight time");
  const std::size_t K = s.num_users();
  const std::size_t G = plan.size();
  const double hover_time = s.period - plan.t_fly;

  // Variables: hover shares u_phi = tau_phi / T, then eta.
  lp::Problem problem;
  problem.objective.assign(G + 1, 0.0);
  problem.objective[G] = 1.0;
  for (std::size_t k = 0; k < K; ++k) {
    double fly = 0.0;
    for (std::size_t j = 0; j < flight.slots; ++j) {
      fly += flight.delta_t * log2_1p(flight.alpha_slot[k][j] * s.power_ave);
    }
    lp::Row row;
    row.coeffs.resize(G + 1);
    for (std::size_t phi = 0; phi < G; ++phi) {
      row.coeffs[phi] = log2_1p(flight.alpha_hover[k][phi] * s.power_ave);
    }
    row.coeffs[G] = -1.0;
    row.sense = lp::Sense::GreaterEqual;
    row.rhs = -fly / s.period;
    problem.rows.push_back(std::move(row));
  }
  lp::Row total;
  total.coeffs.assign(G + 1, 1.0);
  total.coeffs[G] = 0.0;
  total.sense = lp::Sense::Equal;
  total.rhs = hover_time / s.period;
  problem.rows.push_back(std::move(total));
  const auto res = lp::solve(problem);
  if (res.status != lp::Status::Optimal) throw std::runtime_error("equal-power LP failed");

  AllocationSolution sol;
  sol.tau_hover.resize(G);
  sol.energy_hover.resize(G);
  double assigned = 0.0;
  for (std::size_t phi = 0; phi < G; ++phi) {
    sol.tau_hover[phi] = std::max(0.0, res.x[phi]) * s.period;
    if (sol.tau_hover[phi] < 1e-9 * s.period) sol.tau_hover[phi] = 0.0;
    assigned += sol.tau_hover[phi];
  }
  // Rescale away simplex rounding so the durations total T - T_fly.
  if (assigned > 0.0) {
    for (auto& t : sol.tau_hover) t *= hover_time / assigned;
  }
  for (std::size_t phi = 0; phi < G; ++phi) sol.energy_hover[phi] = sol.tau_hover[phi] * s.power_ave;
  sol.p_fly.assign(flight.slots, s.power_ave);
  finish(sol, flight, s);
  return sol;
}

} // namespace uavmc
