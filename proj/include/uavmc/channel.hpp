#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "uavmc/scenario.hpp"

namespace uavmc {

/// Horizontal transmitter position; the altitude is the scenario's H.
struct UavPosition {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const UavPosition&, const UavPosition&) = default;
};

inline constexpr double kLn2 = 0.69314718055994530942;

/// (x - x_k)^2 + (y - y_k)^2 + H^2. Throws std::out_of_range on a bad index.
double squared_distance(UavPosition pos, std::size_t user, const Scenario& scenario);

/// log2(1 + gamma0 p / d_k^2) in bps/Hz. Throws std::invalid_argument for p < 0.
double rate(UavPosition pos, double power, std::size_t user, const Scenario& scenario);

/// Rates of every user at one position/power.
std::vector<double> rates(UavPosition pos, double power, const Scenario& scenario);

/// Multicast rate at one instant: the worst user's rate.
double min_rate(UavPosition pos, double power, const Scenario& scenario);

/// log2(1 + snr) computed as a natural-log ratio.
inline double log2_1p(double snr) { return std::log1p(snr) / kLn2; }

} // namespace uavmc
