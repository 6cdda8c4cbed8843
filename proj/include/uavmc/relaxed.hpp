#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "uavmc/channel.hpp"
#include "uavmc/grid_search.hpp"
#include "uavmc/scenario.hpp"

namespace uavmc {

/**
 * Lagrange multipliers of the speed-unconstrained problem.
 *
 * lambdas[k] prices user k's rate constraint (1/s scale); at any dual point
 * with a finite dual function they sum to 1/T. mu prices the energy budget
 * (per W*s).
 */
struct DualPoint {
  std::vector<double> lambdas;
  double mu = 0.0;
};

/// One maximizer of psi(x, y, p) = sum_k lambda_k R_k(x, y, p) - mu p.
struct InnerSolution {
  UavPosition position;
  double power = 0.0;
  double psi_value = 0.0;
};

struct InnerConfig {
  double tie_epsilon = 1e-6;        // relative band for near-optimal grid maximizers
  double power_cap_factor = 1e6;    // p_max = factor * P_ave
};

struct InnerResult {
  InnerSolution best;
  std::vector<InnerSolution> candidates; // every refined maximizer in the tie band
  bool power_cap_active = false;
  double resolution = 0.0;               // final grid step, m
  std::size_t evaluations = 0;
};

/// Global maximization of psi over the user bounding box and p >= 0:
/// per-point optimal power, 2D coarse-to-fine grid over (x, y).
InnerResult solve_inner(const DualPoint& dual, const Scenario& scenario, const GridSpec& grid,
                        const InnerConfig& config = {});

struct DualEvaluation {
  double value = 0.0;              // dual function, bps/Hz (upper bound on the capacity)
  std::vector<double> subgradient; // [T R_1, ..., T R_K, T (P_ave - p*)]
  InnerResult inner;
};

DualEvaluation dual_value(const DualPoint& dual, const Scenario& scenario, const GridSpec& grid,
                          const InnerConfig& config = {});

struct EllipsoidConfig {
  double tolerance = 1e-5;     // relative certified gap between best value and lower bound
  std::size_t max_iters = 2000;
};

struct RelaxedConfig {
  GridSpec grid;
  InnerConfig inner;
  EllipsoidConfig ellipsoid;
  double merge_radius_min = 1.0;  // m
  double duration_epsilon = 1e-9; // relative to T; shorter hovers are dropped
  bool refine_powers = true;      // re-optimize durations/powers of the surviving hovers
  // Hovers closer than this fraction of the altitude are candidates for merging,
  // accepted when eta drops by at most consolidate_tolerance (relative).
  double consolidate_radius = 0.05;
  double consolidate_tolerance = 1e-6;
};

struct DualSolveResult {
  DualPoint dual;                 // best dual point found
  double value = 0.0;             // dual value there
  double lower_bound = 0.0;       // certified lower bound on the dual optimum
  std::size_t iterations = 0;
  bool converged = false;
  bool power_cap_active = false;
  std::vector<InnerSolution> candidates;  // deduplicated union over all iterations
  std::vector<double> best_value_history; // running minimum after each feasible iterate
  double merge_radius = 0.0;
};

/// Minimizes the dual function with the ellipsoid method over the K-dimensional
/// slice sum(lambda) = 1/T, lambda >= 0, mu >= 0.
DualSolveResult solve_dual(const Scenario& scenario, const RelaxedConfig& config = {});

struct HoverCandidate {
  UavPosition position;
  double power = 0.0;
};

struct Interval {
  double begin = 0.0;
  double end = 0.0;
};

/// Multi-location-hovering plan: hover at locations[i] for durations[i] with
/// powers[i], consecutively.
struct HoverPlan {
  std::vector<UavPosition> locations;
  std::vector<double> durations;
  std::vector<double> powers;
  std::vector<double> per_user_rate; // time-averaged, bps/Hz
  double period = 0.0;
  double eta_star = 0.0;             // min of per_user_rate
  double dual_value = 0.0;
  double duality_gap = 0.0;          // |dual_value - eta_star|
  DualPoint dual;
  std::size_t iterations = 0;
  bool converged = true;
  bool power_cap_active = false;

  std::size_t size() const { return locations.size(); }
  std::vector<Interval> sub_periods() const;
};

/// Time-sharing LP over candidate (position, power) pairs: max eta subject to
/// every user's average rate >= eta, durations summing to T and the energy
/// budget. Durations below duration_epsilon * T are dropped and co-located
/// entries merged.
HoverPlan timeshare_lp(std::span<const HoverCandidate> candidates, const Scenario& scenario,
                       double duration_epsilon = 1e-9);

/// Full relaxed pipeline: dual solve, primal recovery by time sharing.
HoverPlan solve_p2(const Scenario& scenario, const RelaxedConfig& config = {});

/// Per-user time-averaged rates of a plan, recomputed from the raw fields.
std::vector<double> hover_plan_rates(const HoverPlan& plan, const Scenario& scenario);

} // namespace uavmc
