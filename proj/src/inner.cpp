#include "uavmc/inner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "uavmc/channel.hpp"

namespace uavmc {

namespace {

// h(p) = sum w/(a+p) - c and its derivative.
inline void stationarity(std::span<const double> w, std::span<const double> a, double c,
                         double p, double& h, double& dh) {
  double s = 0.0;
  double s2 = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (w[k] <= 0.0) continue;
    const double inv = 1.0 / (a[k] + p);
    s += w[k] * inv;
    s2 += w[k] * inv * inv;
  }
  h = s - c;
  dh = -s2;
}

} // namespace

PowerChoice optimal_power(std::span<const double> w, std::span<const double> a, double price,
                          double p_cap) {
  double wsum = 0.0;
  double a_min = std::numeric_limits<double>::infinity();
  double a_max = 0.0;
  double slope0 = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (w[k] <= 0.0) continue;
    wsum += w[k];
    a_min = std::min(a_min, a[k]);
    a_max = std::max(a_max, a[k]);
    slope0 += w[k] / a[k];
  }
  if (wsum <= 0.0) return {0.0, false};
  const double c = price * kLn2;
  if (slope0 <= c) return {0.0, false};
  if (c <= 0.0) return {p_cap, true};

  // wsum/(a_max+p) <= sum w/(a+p) <= wsum/(a_min+p) brackets the root.
  double lo = std::max(0.0, wsum / c - a_max);
  double hi = wsum / c - a_min;
  if (hi >= p_cap) {
    double h = 0.0;
    double dh = 0.0;
    stationarity(w, a, c, p_cap, h, dh);
    if (h >= 0.0) return {p_cap, true};
    hi = p_cap;
  }

  // Solve g(p) = 1/c with g = 1 / sum w/(a+p). g is a scaled harmonic mean of
  // affine functions, hence concave, increasing and nearly linear, so Newton
  // started left of the root stays left of it and converges in a few steps.
  // The objective is stationary in p, so a power error e costs only O(e^2).
  const double target = 1.0 / c;
  double p = lo;
  for (int it = 0; it < 200; ++it) {
    double h = 0.0;
    double dh = 0.0;
    stationarity(w, a, c, p, h, dh);
    const double s = h + c;
    if (h == 0.0) return {p, false};
    if (h > 0.0) {
      lo = p;
    } else {
      hi = p;
    }
    // g = 1/s and g' = -dh/s^2.
    double next = p + (target - 1.0 / s) * s * s / (-dh);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - p) <= 1e-10 * std::max(p, 1e-300) || hi - lo <= 1e-12 * hi) {
      return {next, false};
    }
    p = next;
  }
  return {p, false};
}

double stationarity_residual(std::span<const double> w, std::span<const double> a,
                             double price, double power) {
  double h = 0.0;
  double dh = 0.0;
  const double c = price * kLn2;
  stationarity(w, a, c, power, h, dh);
  return c > 0.0 ? std::abs(h) / c : std::abs(h);
}

} // namespace uavmc
