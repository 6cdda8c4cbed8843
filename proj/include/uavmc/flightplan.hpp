#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "uavmc/channel.hpp"
#include "uavmc/relaxed.hpp"
#include "uavmc/scenario.hpp"

namespace uavmc {

/// Raised when the period is too short to visit every hover location
/// (T < T_fly). That regime is outside what the planner handles.
class ScopeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TspResult {
  std::vector<std::size_t> order; // visiting order, indices into the input
  double distance = 0.0;          // open-path length, m
  bool heuristic = false;         // true when the order is not proven optimal
};

/// Largest location count solved exactly.
inline constexpr std::size_t kExactTspLimit = 12;

/// Shortest open path through every point. Exact up to kExactTspLimit points
/// (closed tour with an extra zero-distance node, dropped afterwards); among
/// equal-length orders the lexicographically smallest wins. Larger inputs use
/// nearest neighbour plus 2-opt and set the heuristic flag.
TspResult solve_open_tsp(std::span<const UavPosition> points);

/// Sum of consecutive distances along order, accumulated front to back.
double open_path_length(std::span<const UavPosition> points, std::span<const std::size_t> order);

struct FlightSegment {
  UavPosition from;
  UavPosition to;
  double length = 0.0;   // m
  double duration = 0.0; // s, length / V
};

struct FlightPlan {
  std::vector<UavPosition> hover_locations;  // as given, unordered
  std::vector<std::size_t> order;            // visiting order into hover_locations
  std::vector<std::vector<double>> distances; // pairwise, m
  double total_distance = 0.0;               // D, m
  std::vector<double> fly_times;             // Gamma - 1 entries, s
  double t_fly = 0.0;                        // D / V, s
  double speed = 0.0;                        // V, m/s
  bool heuristic = false;

  std::size_t size() const { return hover_locations.size(); }
  /// Location visited in position phi of the order.
  UavPosition visited(std::size_t phi) const { return hover_locations[order[phi]]; }
  std::vector<FlightSegment> segments() const;
};

/// Orders the hover locations and times the straight flights between them.
/// Throws ScopeError when the scenario period is shorter than T_fly and
/// std::invalid_argument for an empty location list.
FlightPlan build_flightplan(std::span<const UavPosition> hover_locations, const Scenario& scenario);

/**
 * Alternating hover and flight sub-periods covering (0, T].
 *
 * Sub-period 2*phi hovers at the phi-th visited location for
 * hover_durations[phi]; sub-period 2*phi + 1 flies to the next one.
 */
struct Schedule {
  std::vector<Interval> sub_periods;  // 2 Gamma - 1 contiguous intervals
  std::vector<double> hover_durations; // visiting order
  double period = 0.0;

  bool is_hover(std::size_t index) const { return index % 2 == 0; }
};

/// Builds the schedule from hover durations given in visiting order. The
/// durations must be non-negative and sum to T - T_fly (relative 1e-9).
Schedule make_schedule(const FlightPlan& plan, std::span<const double> hover_durations,
                       double period);

/// Index of the sub-period containing t, using half-open (begin, end].
std::size_t sub_period_at(const Schedule& schedule, double t);

/// Position at time t in (0, T]; throws std::out_of_range otherwise.
UavPosition position_at(const Schedule& schedule, const FlightPlan& plan, double t);

/// Writes "t,x,y" rows at t = step, 2 step, ..., T.
void write_trajectory_csv(std::ostream& out, const Schedule& schedule, const FlightPlan& plan,
                          double step);

} // namespace uavmc
