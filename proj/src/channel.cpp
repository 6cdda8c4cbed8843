#include "uavmc/channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace uavmc {

double squared_distance(UavPosition pos, std::size_t user, const Scenario& scenario) {
  if (user >= scenario.users.size()) throw std::out_of_range("user index out of range");
  const double dx = pos.x - scenario.users[user].x;
  const double dy = pos.y - scenario.users[user].y;
  return dx * dx + dy * dy + scenario.altitude * scenario.altitude;
}

double rate(UavPosition pos, double power, std::size_t user, const Scenario& scenario) {
  if (!(power >= 0.0)) throw std::invalid_argument("transmit power must be >= 0");
  const double d2 = squared_distance(pos, user, scenario);
  return log2_1p(scenario.gamma0() * power / d2);
}

std::vector<double> rates(UavPosition pos, double power, const Scenario& scenario) {
  std::vector<double> out(scenario.users.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = rate(pos, power, k, scenario);
  return out;
}

double min_rate(UavPosition pos, double power, const Scenario& scenario) {
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < scenario.users.size(); ++k) {
    worst = std::min(worst, rate(pos, power, k, scenario));
  }
  return worst;
}

} // namespace uavmc
