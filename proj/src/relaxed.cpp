#include "uavmc/relaxed.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "uavmc/inner.hpp"
#include "uavmc/lp.hpp"
#include "uavmc/perspective_program.hpp"

namespace uavmc {

namespace {

// Normalized multipliers: weights w = T * lambda (sum to 1) and the energy
// price per Watt, T * mu.
struct Prices {
  std::vector<double> weights;
  double price = 0.0;
};

Prices to_prices(const DualPoint& dual, const Scenario& s) {
  if (dual.lambdas.size() != s.num_users()) {
    throw std::invalid_argument("dual point has wrong number of multipliers");
  }
  Prices out;
  out.weights.resize(dual.lambdas.size());
  for (std::size_t k = 0; k < dual.lambdas.size(); ++k) out.weights[k] = dual.lambdas[k] * s.period;
  out.price = dual.mu * s.period;
  return out;
}

DualPoint to_dual(const Prices& prices, const Scenario& s) {
  DualPoint d;
  d.lambdas.resize(prices.weights.size());
  for (std::size_t k = 0; k < prices.weights.size(); ++k) d.lambdas[k] = prices.weights[k] / s.period;
  d.mu = prices.price / s.period;
  return d;
}

void noise_distances(UavPosition pos, const Scenario& s, std::vector<double>& a) {
  const double g0 = s.gamma0();
  a.resize(s.num_users());
  for (std::size_t k = 0; k < a.size(); ++k) a[k] = squared_distance(pos, k, s) / g0;
}

// Weighted-rate objective at a position with its optimal power (normalized
// scale: T * psi).
double weighted_objective(const Prices& pr, std::span<const double> a, double power) {
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (pr.weights[k] > 0.0) acc += pr.weights[k] * log2_1p(power / a[k]);
  }
  return acc - pr.price * power;
}

InnerResult solve_inner_prices(const Prices& pr, const Scenario& s, const GridSpec& grid,
                               const InnerConfig& cfg) {
  const double p_cap = cfg.power_cap_factor * s.power_ave;
  const BoundingBox box = user_bounding_box(s);
  auto objective = [&](double x, double y) {
    thread_local std::vector<double> a;
    noise_distances({x, y}, s, a);
    const auto choice = optimal_power(pr.weights, a, pr.price, p_cap);
    return weighted_objective(pr, a, choice.power);
  };
  const auto search = grid_maximize(box, grid, objective);

  InnerResult out;
  out.evaluations = search.evaluations;
  out.resolution = std::max(search.step_x, search.step_y);
  const double best_value = search.peaks.front().value;
  const double band = cfg.tie_epsilon * std::max(std::abs(best_value), 1e-300);
  std::vector<double> a;
  for (const auto& peak : search.peaks) {
    if (peak.value < best_value - band) continue;
    noise_distances({peak.x, peak.y}, s, a);
    const auto choice = optimal_power(pr.weights, a, pr.price, p_cap);
    out.power_cap_active = out.power_cap_active || choice.capped;
    out.candidates.push_back({{peak.x, peak.y}, choice.power, peak.value / s.period});
  }
  out.best = out.candidates.front();
  return out;
}

struct Evaluation {
  double value = 0.0;            // dual function
  std::vector<double> rates;     // R_k at the inner maximizer
  double power = 0.0;
  InnerResult inner;
};

Evaluation evaluate_prices(const Prices& pr, const Scenario& s, const GridSpec& grid,
                           const InnerConfig& cfg) {
  Evaluation ev;
  ev.inner = solve_inner_prices(pr, s, grid, cfg);
  ev.power = ev.inner.best.power;
  ev.rates = rates(ev.inner.best.position, ev.power, s);
  double psi = 0.0;
  for (std::size_t k = 0; k < ev.rates.size(); ++k) psi += pr.weights[k] * ev.rates[k];
  psi -= pr.price * ev.power;
  ev.value = psi + pr.price * s.power_ave;
  return ev;
}

class CandidatePool {
 public:
  explicit CandidatePool(double radius) : radius2_(radius * radius) {}
  void add(const InnerSolution& c) {
    for (const auto& e : items_) {
      const double dx = e.position.x - c.position.x;
      const double dy = e.position.y - c.position.y;
      if (dx * dx + dy * dy < radius2_) return;
    }
    items_.push_back(c);
  }
  std::vector<InnerSolution> take() { return std::move(items_); }

 private:
  double radius2_;
  std::vector<InnerSolution> items_;
};

// Ellipsoid coordinates z = (w_1 .. w_{K-1}, m) with m = price * P_ave.
Prices prices_from_z(const Eigen::VectorXd& z, std::size_t K, double power_ave) {
  Prices pr;
  pr.weights.resize(K);
  double sum = 0.0;
  for (std::size_t k = 0; k + 1 < K; ++k) {
    pr.weights[k] = z(static_cast<Eigen::Index>(k));
    sum += pr.weights[k];
  }
  pr.weights[K - 1] = 1.0 - sum;
  pr.price = z(static_cast<Eigen::Index>(K - 1)) / power_ave;
  return pr;
}

// Most violated feasibility constraint g.z <= h as (violation, gradient).
bool most_violated(const Eigen::VectorXd& z, std::size_t K, double& violation,
                   Eigen::VectorXd& grad) {
  const auto n = z.size();
  violation = 0.0;
  bool any = false;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<std::size_t>(i) + 1 < K) sum += z(i);
    if (-z(i) > violation) {
      violation = -z(i);
      grad = Eigen::VectorXd::Zero(n);
      grad(i) = -1.0;
      any = true;
    }
  }
  if (K > 1 && sum - 1.0 > violation) {
    violation = sum - 1.0;
    grad = Eigen::VectorXd::Ones(n);
    grad(n - 1) = 0.0;
    any = true;
  }
  return any;
}

} // namespace

std::vector<Interval> HoverPlan::sub_periods() const {
  std::vector<Interval> out;
  out.reserve(durations.size());
  double t = 0.0;
  for (double d : durations) {
    out.push_back({t, t + d});
    t += d;
  }
  return out;
}

InnerResult solve_inner(const DualPoint& dual, const Scenario& scenario, const GridSpec& grid,
                        const InnerConfig& config) {
  return solve_inner_prices(to_prices(dual, scenario), scenario, grid, config);
}

DualEvaluation dual_value(const DualPoint& dual, const Scenario& scenario, const GridSpec& grid,
                          const InnerConfig& config) {
  const auto ev = evaluate_prices(to_prices(dual, scenario), scenario, grid, config);
  DualEvaluation out;
  out.value = ev.value;
  out.subgradient.resize(scenario.num_users() + 1);
  for (std::size_t k = 0; k < ev.rates.size(); ++k) out.subgradient[k] = scenario.period * ev.rates[k];
  out.subgradient.back() = scenario.period * (scenario.power_ave - ev.power);
  out.inner = ev.inner;
  return out;
}

DualSolveResult solve_dual(const Scenario& s, const RelaxedConfig& cfg) {
  require_valid(s);
  if (!(s.power_ave > 0.0)) throw std::invalid_argument("dual solve needs power_ave > 0");
  const std::size_t K = s.num_users();
  const auto n = static_cast<Eigen::Index>(K);
  const double m_bound = 1.0 / kLn2; // P_ave * d(capacity)/dP_ave never exceeds 1/ln 2

  DualSolveResult out;
  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) z(i) = 1.0 / static_cast<double>(K);
  z(n - 1) = 0.5 * m_bound;
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
  const double scale = std::sqrt(static_cast<double>(n));
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const double r = scale * (1.0 - 1.0 / static_cast<double>(K));
    P(i, i) = r * r;
  }
  {
    const double r = scale * 0.6 * m_bound;
    P(n - 1, n - 1) = r * r;
  }

  double best = std::numeric_limits<double>::infinity();
  double lower = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_z = z;
  double merge_radius = cfg.merge_radius_min;
  std::vector<InnerSolution> seen;
  CandidatePool pool(merge_radius);
  bool pool_ready = false;
  const double dn = static_cast<double>(n);

  for (std::size_t it = 0; it < cfg.ellipsoid.max_iters; ++it) {
    out.iterations = it + 1;
    Eigen::VectorXd g;
    double alpha = 0.0;
    double violation = 0.0;
    if (most_violated(z, K, violation, g)) {
      alpha = violation / std::sqrt(g.dot(P * g));
    } else {
      const Prices pr = prices_from_z(z, K, s.power_ave);
      const Evaluation ev = evaluate_prices(pr, s, cfg.grid, cfg.inner);
      if (!pool_ready) {
        merge_radius = std::max(cfg.merge_radius_min, 2.0 * ev.inner.resolution);
        pool = CandidatePool(merge_radius);
        pool_ready = true;
      }
      for (const auto& c : ev.inner.candidates) pool.add(c);
      out.power_cap_active = out.power_cap_active || ev.inner.power_cap_active;

      g.resize(n);
      for (std::size_t k = 0; k + 1 < K; ++k) {
        g(static_cast<Eigen::Index>(k)) = ev.rates[k] - ev.rates[K - 1];
      }
      g(n - 1) = 1.0 - ev.power / s.power_ave;
      if (ev.value < best) {
        best = ev.value;
        best_z = z;
      }
      out.best_value_history.push_back(best);
      const double gpg = g.dot(P * g);
      const double width = std::sqrt(std::max(gpg, 0.0));
      lower = std::max(lower, ev.value - width);
      if (best - lower <= cfg.ellipsoid.tolerance * std::max(std::abs(best), 1e-12)) {
        out.converged = true;
        break;
      }
      if (width <= 0.0) {
        out.converged = true; // zero subgradient: z is optimal
        break;
      }
      alpha = (ev.value - best) / width;
    }

    alpha = std::clamp(alpha, 0.0, 0.9);
    if (n == 1) {
      // Interval [z - r, z + r]; keep the half (deep cut) where g.(y - z) <= -alpha*|g| r.
      const double r = std::sqrt(P(0, 0));
      const double sgn = g(0) > 0.0 ? 1.0 : -1.0;
      const double lo = sgn > 0.0 ? z(0) - r : z(0) + alpha * r;
      const double hi = sgn > 0.0 ? z(0) - alpha * r : z(0) + r;
      z(0) = 0.5 * (lo + hi);
      P(0, 0) = 0.25 * (hi - lo) * (hi - lo);
    } else {
      const Eigen::VectorXd pg = P * g;
      const double gpg = g.dot(pg);
      if (!(gpg > 0.0)) break;
      const Eigen::VectorXd gt = pg / std::sqrt(gpg);
      z -= (1.0 + dn * alpha) / (dn + 1.0) * gt;
      P = (dn * dn * (1.0 - alpha * alpha) / (dn * dn - 1.0)) *
          (P - (2.0 * (1.0 + dn * alpha) / ((dn + 1.0) * (1.0 + alpha))) * gt * gt.transpose());
      P = 0.5 * (P + P.transpose());
    }
    if (P.diagonal().maxCoeff() <= 1e-30) {
      out.converged = true;
      break;
    }
  }

  const Prices pr = prices_from_z(best_z, K, s.power_ave);
  out.dual = to_dual(pr, s);
  out.value = best;
  out.lower_bound = lower;
  out.candidates = pool.take();
  out.merge_radius = merge_radius;
  return out;
}

std::vector<double> hover_plan_rates(const HoverPlan& plan, const Scenario& s) {
  std::vector<double> r(s.num_users(), 0.0);
  for (std::size_t i = 0; i < plan.size(); ++i) {
    for (std::size_t k = 0; k < r.size(); ++k) {
      r[k] += plan.durations[i] * rate(plan.locations[i], plan.powers[i], k, s);
    }
  }
  for (auto& v : r) v /= s.period;
  return r;
}

namespace {

// Drops near-zero durations, merges identical positions (energy-weighted power)
// and restores sum(durations) = T.
HoverPlan tidy_plan(std::vector<UavPosition> loc, std::vector<double> dur, std::vector<double> pow,
                    const Scenario& s, double duration_epsilon) {
  HoverPlan plan;
  plan.period = s.period;
  for (std::size_t i = 0; i < loc.size(); ++i) {
    if (dur[i] < duration_epsilon * s.period) continue;
    bool merged = false;
    for (std::size_t j = 0; j < plan.size(); ++j) {
      if (plan.locations[j] == loc[i]) {
        const double energy = plan.durations[j] * plan.powers[j] + dur[i] * pow[i];
        plan.durations[j] += dur[i];
        plan.powers[j] = energy / plan.durations[j];
        merged = true;
        break;
      }
    }
    if (!merged) {
      plan.locations.push_back(loc[i]);
      plan.durations.push_back(dur[i]);
      plan.powers.push_back(pow[i]);
    }
  }
  if (plan.size() == 0) {
    // Everything below epsilon cannot happen for sum = T; keep the longest.
    const auto it = std::max_element(dur.begin(), dur.end());
    const auto i = static_cast<std::size_t>(it - dur.begin());
    plan.locations.push_back(loc[i]);
    plan.durations.push_back(dur[i]);
    plan.powers.push_back(pow[i]);
  }
  double total = 0.0;
  for (double d : plan.durations) total += d;
  // Rescaling durations at fixed power moves energy by the same tiny factor;
  // shrink powers accordingly so the budget still holds.
  const double factor = s.period / total;
  for (auto& d : plan.durations) d *= factor;
  if (factor > 1.0) {
    for (auto& p : plan.powers) p /= factor;
  }
  plan.per_user_rate = hover_plan_rates(plan, s);
  plan.eta_star = *std::min_element(plan.per_user_rate.begin(), plan.per_user_rate.end());
  return plan;
}

// Re-optimizes durations and powers over fixed locations.
HoverPlan polish(const std::vector<UavPosition>& locations, const Scenario& s,
                 double duration_epsilon) {
  const std::size_t K = s.num_users();
  PerspectiveProblem pb;
  pb.users = K;
  pb.hover_fraction = 1.0;
  pb.hover_snr.assign(K, std::vector<double>(locations.size()));
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t i = 0; i < locations.size(); ++i) {
      pb.hover_snr[k][i] = s.gamma0() * s.power_ave / squared_distance(locations[i], k, s);
    }
  }
  const auto sol = solve_perspective_program(pb);
  std::vector<double> dur(locations.size());
  std::vector<double> pow(locations.size());
  for (std::size_t i = 0; i < locations.size(); ++i) {
    dur[i] = sol.u[i] * s.period;
    pow[i] = sol.u[i] > 0.0 ? sol.v[i] * s.power_ave / sol.u[i] : 0.0;
  }
  return tidy_plan(locations, dur, pow, s, duration_epsilon);
}

// Grid ties along a ridge leave hovers a metre or two apart. Merge the closest
// such pair while the polished plan keeps its min-rate.
HoverPlan consolidate(HoverPlan plan, const Scenario& s, const RelaxedConfig& cfg) {
  const double radius = cfg.consolidate_radius * s.altitude;
  std::vector<std::pair<UavPosition, UavPosition>> tried;
  while (plan.size() > 1) {
    double best_d2 = radius * radius;
    std::size_t bi = plan.size();
    std::size_t bj = plan.size();
    for (std::size_t i = 0; i < plan.size(); ++i) {
      for (std::size_t j = i + 1; j < plan.size(); ++j) {
        const auto& p = plan.locations[i];
        const auto& q = plan.locations[j];
        const bool seen = std::any_of(tried.begin(), tried.end(), [&](const auto& t) {
          return (t.first == p && t.second == q) || (t.first == q && t.second == p);
        });
        const double dx = p.x - q.x;
        const double dy = p.y - q.y;
        const double d2 = dx * dx + dy * dy;
        if (!seen && d2 <= best_d2) {
          best_d2 = d2;
          bi = i;
          bj = j;
        }
      }
    }
    if (bi == plan.size()) break;
    tried.emplace_back(plan.locations[bi], plan.locations[bj]);

    const auto& p = plan.locations[bi];
    const auto& q = plan.locations[bj];
    const double wp = plan.durations[bi];
    const double wq = plan.durations[bj];
    const UavPosition mid{(wp * p.x + wq * q.x) / (wp + wq), (wp * p.y + wq * q.y) / (wp + wq)};
    const double floor = plan.eta_star * (1.0 - cfg.consolidate_tolerance);
    HoverPlan best_plan;
    bool found = false;
    for (const UavPosition keep : {p, q, mid}) {
      std::vector<UavPosition> locs;
      for (std::size_t i = 0; i < plan.size(); ++i) {
        if (i != bi && i != bj) locs.push_back(plan.locations[i]);
      }
      locs.push_back(keep);
      HoverPlan trial = polish(locs, s, cfg.duration_epsilon);
      if (trial.eta_star >= floor && (!found || trial.eta_star > best_plan.eta_star)) {
        best_plan = std::move(trial);
        found = true;
      }
    }
    if (found) plan = std::move(best_plan);
  }
  return plan;
}

} // namespace

HoverPlan timeshare_lp(std::span<const HoverCandidate> candidates, const Scenario& s,
                       double duration_epsilon) {
  if (candidates.empty()) throw std::invalid_argument("time-sharing LP needs candidates");
  const std::size_t K = s.num_users();
  const std::size_t n = candidates.size();
  // Variables: shares s_i = t_i / T (i < n), then eta.
  lp::Problem problem;
  problem.objective.assign(n + 1, 0.0);
  problem.objective[n] = 1.0;
  for (std::size_t k = 0; k < K; ++k) {
    lp::Row row;
    row.coeffs.resize(n + 1);
    for (std::size_t i = 0; i < n; ++i) row.coeffs[i] = rate(candidates[i].position, candidates[i].power, k, s);
    row.coeffs[n] = -1.0;
    row.sense = lp::Sense::GreaterEqual;
    row.rhs = 0.0;
    problem.rows.push_back(std::move(row));
  }
  lp::Row total;
  total.coeffs.assign(n + 1, 1.0);
  total.coeffs[n] = 0.0;
  total.sense = lp::Sense::Equal;
  total.rhs = 1.0;
  problem.rows.push_back(total);
  lp::Row energy;
  energy.coeffs.assign(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) energy.coeffs[i] = candidates[i].power;
  energy.sense = lp::Sense::LessEqual;
  energy.rhs = s.power_ave;
  problem.rows.push_back(energy);

  const auto sol = lp::solve(problem);
  if (sol.status != lp::Status::Optimal) {
    throw std::runtime_error("time-sharing LP has no feasible time split within the energy budget");
  }
  std::vector<UavPosition> loc;
  std::vector<double> dur;
  std::vector<double> pow;
  for (std::size_t i = 0; i < n; ++i) {
    loc.push_back(candidates[i].position);
    dur.push_back(sol.x[i] * s.period);
    pow.push_back(candidates[i].power);
  }
  return tidy_plan(std::move(loc), std::move(dur), std::move(pow), s, duration_epsilon);
}

HoverPlan solve_p2(const Scenario& s, const RelaxedConfig& cfg) {
  require_valid(s);
  const std::size_t K = s.num_users();
  if (!(s.power_ave > 0.0)) {
    HoverPlan plan;
    plan.period = s.period;
    plan.locations.push_back({s.users[0].x, s.users[0].y});
    plan.durations.push_back(s.period);
    plan.powers.push_back(0.0);
    plan.per_user_rate.assign(K, 0.0);
    plan.dual.lambdas.assign(K, 1.0 / (static_cast<double>(K) * s.period));
    return plan;
  }

  const auto dual = solve_dual(s, cfg);
  const Prices star = to_prices(dual.dual, s);
  const double p_cap = cfg.inner.power_cap_factor * s.power_ave;

  // Columns: each location at its optimal power under the best dual point, at
  // the power it was discovered with, and silent (keeps the LP feasible).
  std::vector<HoverCandidate> columns;
  std::vector<double> a;
  for (const auto& c : dual.candidates) {
    noise_distances(c.position, s, a);
    const double p_star = optimal_power(star.weights, a, star.price, p_cap).power;
    columns.push_back({c.position, p_star});
    if (c.power != p_star) columns.push_back({c.position, c.power});
    columns.push_back({c.position, 0.0});
  }
  HoverPlan plan = timeshare_lp(columns, s, cfg.duration_epsilon);

  if (cfg.refine_powers) {
    HoverPlan refined = polish(plan.locations, s, cfg.duration_epsilon);
    if (refined.eta_star >= plan.eta_star) plan = std::move(refined);
    plan = consolidate(std::move(plan), s, cfg);
  }

  plan.dual = dual.dual;
  plan.dual_value = dual.value;
  plan.duality_gap = std::abs(dual.value - plan.eta_star);
  plan.iterations = dual.iterations;
  plan.converged = dual.converged;
  plan.power_cap_active = dual.power_cap_active;
  return plan;
}

} // namespace uavmc
