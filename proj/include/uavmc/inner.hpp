#pragma once

#include <cstddef>
#include <span>

namespace uavmc {

struct PowerChoice {
  double power = 0.0;
  bool capped = false; // the cap was binding (zero energy price)
};

/**
 * Maximizer over p >= 0 of
 *     sum_k w_k log2(1 + p / a_k) - price * p
 * where a_k = d_k^2 / gamma0 (> 0) and price is in (bps/Hz) per Watt.
 *
 * The objective is strictly concave, so the maximizer is the root of the
 * decreasing stationarity function sum_k w_k / (a_k + p) = price * ln 2, or
 * p = 0 when the slope at zero is not positive. The root is bracketed using
 * sum_k w_k bounds and located with Newton steps kept inside the bracket
 * (bisection fallback). p_cap bounds the search when price == 0.
 */
PowerChoice optimal_power(std::span<const double> weights, std::span<const double> noise_dist,
                          double price, double p_cap);

/// |sum_k w_k / (a_k + p) - price ln2| relative to price ln2.
double stationarity_residual(std::span<const double> weights,
                             std::span<const double> noise_dist, double price, double power);

} // namespace uavmc
