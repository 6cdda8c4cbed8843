#pragma once

#include <cstddef>
#include <vector>

namespace uavmc {

/**
 * Normalized joint duration/energy/power program
 *
 *   max eta
 *   s.t. sum_h u_h log2(1 + a_kh v_h / u_h) + delta sum_j log2(1 + b_kj q_j) >= eta  (all k)
 *        sum_h v_h + delta sum_j q_j <= 1
 *        sum_h u_h = hover_fraction
 *        u, v, q >= 0
 *
 * u_h = tau_h / T, v_h = E_h / (T P_ave), q_j = p_j / P_ave, a and b are the
 * full-power SNRs. The hover terms are perspectives of a concave function, so
 * the program is convex. It is solved with a primal-dual interior-point method
 * that keeps the primal iterates strictly feasible. Every Newton system is
 * block-diagonal plus rank (K + 1) and is reduced to a dense (K + 3) system.
 */
struct PerspectiveProblem {
  std::size_t users = 0;
  std::vector<std::vector<double>> hover_snr; // [k][h]
  std::vector<std::vector<double>> slot_snr;  // [k][j]
  double hover_fraction = 1.0;                // (T - T_fly) / T
  double slot_fraction = 0.0;                 // delta_t / T

  std::size_t hovers() const { return hover_snr.empty() ? 0 : hover_snr[0].size(); }
  std::size_t slots() const { return slot_snr.empty() ? 0 : slot_snr[0].size(); }
};

struct InteriorPointConfig {
  double tolerance = 1e-9;       // target for the KKT residual
  double centering = 0.1;        // fraction of the mean complementarity aimed for per step
  std::size_t max_iterations = 300;
};

struct PerspectiveSolution {
  std::vector<double> u, v, q;
  double eta = 0.0;
  std::vector<double> rate;     // per-user normalized average rate
  std::vector<double> weights;  // rate-constraint multipliers, sum to 1
  double energy_price = 0.0;    // energy-constraint multiplier
  double duration_price = 0.0;  // equality multiplier
  double stationarity = 0.0;
  double complementarity = 0.0;
  double infeasibility = 0.0;
  double kkt_residual = 0.0;    // max of the three above
  std::size_t iterations = 0;
  bool converged = false;       // kkt_residual <= tolerance
};

/// Per-user objective rows for given variables; the hover term at u = 0 is 0.
std::vector<double> perspective_rates(const PerspectiveProblem& problem,
                                      const std::vector<double>& u,
                                      const std::vector<double>& v,
                                      const std::vector<double>& q);

/// Solves the program. A problem without hovers must have slots and vice versa.
PerspectiveSolution solve_perspective_program(const PerspectiveProblem& problem,
                                              const InteriorPointConfig& config = {});

} // namespace uavmc
