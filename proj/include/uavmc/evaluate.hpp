#pragma once

#include <string>
#include <vector>

#include "uavmc/alloc.hpp"
#include "uavmc/flightplan.hpp"
#include "uavmc/relaxed.hpp"
#include "uavmc/scenario.hpp"

namespace uavmc {

// Constraint flag names reported by evaluate().
inline constexpr const char* kFlagEnergy = "energy_budget_exceeded";
inline constexpr const char* kFlagSpeed = "speed_limit_exceeded";
inline constexpr const char* kFlagDuration = "durations_do_not_cover_period";
inline constexpr const char* kFlagNegative = "negative_duration_or_power";

struct EvaluationReport {
  std::vector<double> per_user_avg_rate; // bps/Hz
  double min_rate = 0.0;
  double energy_used = 0.0;         // J
  double max_speed_observed = 0.0;  // m/s
  std::vector<std::string> constraint_flags; // empty when every check passes
  bool ok() const { return constraint_flags.empty(); }
};

/**
 * Independent check of a schedule. Rates come straight from the scenario
 * geometry. The trajectory is rebuilt from the raw plan fields, never from
 * solver gains. Integration splits (0, T] at every hover, flight and slot
 * boundary and applies the midpoint rule with steps of at most dt inside
 * each piece. Speed is the largest finite difference of positions sampled
 * every dt.
 *
 * Throws std::invalid_argument when dt <= 0 or when the plan does not fit
 * the scenario (user count, location count, slot count).
 */
EvaluationReport evaluate(const HoverPlan& plan, const Scenario& scenario, double dt);
EvaluationReport evaluate(const FlightPlan& route, const AllocationSolution& allocation,
                          const Scenario& scenario, double dt);

} // namespace uavmc
