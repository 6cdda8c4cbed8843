#include "uavmc/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace uavmc {

namespace {

bool finite(double v) { return std::isfinite(v); }

// 53 random mantissa bits -> [0, 1). Avoids the implementation-defined
// std::uniform_real_distribution so files are identical across toolchains.
double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

} // namespace

ValidationReport validate(const Scenario& s) {
  ValidationReport report;
  auto& v = report.violations;
  if (s.users.empty()) v.emplace_back("users non-empty");
  for (std::size_t k = 0; k < s.users.size(); ++k) {
    if (!finite(s.users[k].x) || !finite(s.users[k].y)) {
      v.emplace_back("user " + std::to_string(k) + " coordinates finite");
    }
  }
  if (!(s.altitude > 0.0) || !finite(s.altitude)) v.emplace_back("altitude_H > 0");
  if (!(s.period > 0.0) || !finite(s.period)) v.emplace_back("period_T > 0");
  if (!(s.speed > 0.0) || !finite(s.speed)) v.emplace_back("speed_V > 0");
  if (!(s.power_ave >= 0.0) || !finite(s.power_ave)) v.emplace_back("power_ave >= 0");
  if (!(s.beta0 > 0.0) || !finite(s.beta0)) v.emplace_back("beta0 > 0");
  if (!(s.noise_power > 0.0) || !finite(s.noise_power)) v.emplace_back("noise_power > 0");
  return report;
}

void require_valid(const Scenario& scenario) {
  auto report = validate(scenario);
  if (report.ok()) return;
  std::ostringstream msg;
  msg << "invalid scenario:";
  for (const auto& violation : report.violations) msg << " [" << violation << "]";
  throw std::invalid_argument(msg.str());
}

BoundingBox user_bounding_box(const Scenario& scenario) {
  if (scenario.users.empty()) throw std::invalid_argument("scenario has no users");
  BoundingBox box{scenario.users[0].x, scenario.users[0].x, scenario.users[0].y,
                  scenario.users[0].y};
  for (const auto& u : scenario.users) {
    box.x_min = std::min(box.x_min, u.x);
    box.x_max = std::max(box.x_max, u.x);
    box.y_min = std::min(box.y_min, u.y);
    box.y_max = std::max(box.y_max, u.y);
  }
  return box;
}

Scenario generate_random(std::uint64_t seed, std::size_t num_users, double width,
                         double height, const ScenarioDefaults& defaults) {
  if (num_users == 0) throw std::invalid_argument("number of users must be >= 1");
  if (!(width > 0.0) || !(height > 0.0)) {
    throw std::invalid_argument("area sides must be > 0");
  }
  std::mt19937_64 rng(seed);
  Scenario s;
  s.users.reserve(num_users);
  for (std::size_t k = 0; k < num_users; ++k) {
    const double x = unit_uniform(rng) * width;
    const double y = unit_uniform(rng) * height;
    s.users.push_back({x, y});
  }
  s.altitude = defaults.altitude;
  s.period = defaults.period;
  s.speed = defaults.speed;
  s.power_ave = defaults.power_ave;
  s.beta0 = defaults.beta0;
  s.noise_power = defaults.noise_power;
  return s;
}

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }
double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

} // namespace uavmc
