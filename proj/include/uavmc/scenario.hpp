#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace uavmc {

/// Fixed ground user location, meters.
struct GroundUser {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const GroundUser&, const GroundUser&) = default;
};

/**
 * Problem instance: K ground users served by one transmitter flying at a
 * fixed altitude over the mission period (0, T].
 *
 * All radio quantities are linear (Watts, dimensionless gains). dB/dBm only
 * appear in the scenario file.
 */
struct Scenario {
  std::vector<GroundUser> users;
  double altitude = 100.0;      // H, m
  double period = 200.0;        // T, s
  double speed = 20.0;          // V, m/s
  double power_ave = 1.0;       // P_ave, W
  double beta0 = 1e-3;          // channel power gain at 1 m
  double noise_power = 1e-8;    // sigma^2, W

  /// Reference SNR beta0 / sigma^2, in 1/W. Always derived, never stored.
  double gamma0() const { return beta0 / noise_power; }
  std::size_t num_users() const { return users.size(); }

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

struct BoundingBox {
  double x_min = 0.0;
  double x_max = 0.0;
  double y_min = 0.0;
  double y_max = 0.0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  bool contains(double x, double y) const {
    return x >= x_min && x <= x_max && y >= y_min && y <= y_max;
  }
};

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

/// Checks every scenario invariant; never throws.
ValidationReport validate(const Scenario& scenario);

/// Throws std::invalid_argument listing the violations when invalid.
void require_valid(const Scenario& scenario);

/// Axis-aligned box spanned by the user coordinates. Every optimal hover
/// point of the relaxed problem lies inside it.
BoundingBox user_bounding_box(const Scenario& scenario);

/// Radio/mission defaults used by generate_random.
struct ScenarioDefaults {
  double altitude = 100.0;
  double period = 200.0;
  double speed = 20.0;
  double power_ave = 1.0;    // 30 dBm
  double beta0 = 1e-3;       // -30 dB
  double noise_power = 1e-8; // -50 dBm
};

/// Users i.i.d. uniform in [0, width] x [0, height]; pure function of its
/// arguments on every platform.
Scenario generate_random(std::uint64_t seed, std::size_t num_users, double width,
                         double height, const ScenarioDefaults& defaults = {});

// dB helpers for the file/CLI boundary.
double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);
double db_to_linear(double db);
double linear_to_db(double linear);

} // namespace uavmc
