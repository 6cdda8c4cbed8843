#pragma once

#include <string>

#include "uavmc/scenario.hpp"
#include "uavmc/serialize.hpp"

namespace fixtures {

inline std::string data_path(const std::string& name) { return std::string(UAVMC_TEST_DATA) + "/" + name; }

inline const char* const kGoldenFiles[] = {"golden_k10_s11.json", "golden_k10_s12.json",
                                            "golden_k10_s13.json", "golden_k4_s21.json"};

inline uavmc::Scenario golden(const std::string& name) { return uavmc::load_scenario(data_path(name)); }

/// Default radio parameters with the given users.
inline uavmc::Scenario with_users(std::vector<uavmc::GroundUser> users) {
  uavmc::Scenario s;
  s.users = std::move(users);
  return s;
}

} // namespace fixtures
