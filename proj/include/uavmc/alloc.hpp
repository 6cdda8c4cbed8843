#pragma once

#include <cstddef>
#include <vector>

#include "uavmc/flightplan.hpp"
#include "uavmc/grid_search.hpp"
#include "uavmc/perspective_program.hpp"
#include "uavmc/scenario.hpp"

namespace uavmc {

/// Flight time cut into N equal slots, each treated as a fixed position.
struct DiscretizedFlight {
  std::size_t slots = 0;                  // N
  double delta_t = 0.0;                   // T_fly / N, s
  std::vector<UavPosition> slot_positions; // sampled at slot midpoints
  std::vector<std::vector<double>> alpha_hover; // [k][phi], 1/W, visiting order
  std::vector<std::vector<double>> alpha_slot;  // [k][j], 1/W
};

/// Smallest N with T_fly / N <= max_slot (0 when there is no flight).
std::size_t default_slot_count(double t_fly, double max_slot = 0.5);

/// Throws std::invalid_argument for N = 0 with a non-zero flight time.
DiscretizedFlight discretize(const FlightPlan& plan, const Scenario& scenario, std::size_t slots);

/// Durations, energies and powers for a fixed hover-and-fly route. Hover
/// entries follow the visiting order.
struct AllocationSolution {
  std::vector<double> tau_hover;    // s
  std::vector<double> energy_hover; // J
  std::vector<double> p_hover;      // W, E / tau with 0/0 -> 0
  std::vector<double> p_fly;        // W, one per slot
  double delta_t = 0.0;             // s
  std::vector<double> per_user_rate; // bps/Hz, recomputed from the fields above
  double eta = 0.0;                 // min of per_user_rate
  double kkt_residual = 0.0;
  bool converged = true;
};

/// Time-averaged user rates implied by an allocation's raw fields.
std::vector<double> allocation_rates(const AllocationSolution& solution,
                                     const DiscretizedFlight& flight, const Scenario& scenario);

/// Total energy of an allocation, J.
double allocation_energy(const AllocationSolution& solution);

/// Joint optimization of hover durations, hover energies and slot powers.
AllocationSolution optimize_joint(const DiscretizedFlight& flight, const FlightPlan& plan,
                                  const Scenario& scenario, const InteriorPointConfig& config = {});

struct StaticResult {
  UavPosition position;
  double eta = 0.0;
};

/// Best single hover point at constant power P_ave.
StaticResult benchmark_static(const Scenario& scenario, const GridSpec& grid = {});

/// Same route with every power fixed at P_ave; only hover durations vary.
AllocationSolution benchmark_equal_power(const FlightPlan& plan, const DiscretizedFlight& flight,
                                         const Scenario& scenario);

} // namespace uavmc
