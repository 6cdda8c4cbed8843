#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "uavmc/pipeline.hpp"

namespace uavmc {

/// Raised for unreadable or malformed input files.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Scenario files store radio quantities in dBm / dB:
//   {"users": [[x, y], ...], "altitude_m", "period_s", "speed_mps",
//    "power_ave_dbm" (null for a zero budget), "beta0_db", "noise_dbm"}
nlohmann::json scenario_to_json(const Scenario& scenario);
Scenario scenario_from_json(const nlohmann::json& j);
Scenario load_scenario(const std::string& path);
void save_scenario(const std::string& path, const Scenario& scenario);

nlohmann::json hover_plan_to_json(const HoverPlan& plan);
HoverPlan hover_plan_from_json(const nlohmann::json& j);

nlohmann::json flightplan_to_json(const FlightPlan& route, const Schedule& schedule);

/// Allocation together with the route it belongs to, so the file can be
/// evaluated on its own.
nlohmann::json allocation_to_json(const AllocationSolution& alloc, const FlightPlan& route);
void allocation_from_json(const nlohmann::json& j, AllocationSolution& alloc, FlightPlan& route);

nlohmann::json evaluation_to_json(const EvaluationReport& report);
nlohmann::json static_to_json(const StaticResult& result);
nlohmann::json summary_to_json(const PipelineResult& result);

/// Step-function power schedule: one "t,x,y,p" row at the start of every
/// constant-power stretch plus a closing row at T.
void write_power_schedule_csv(std::ostream& out, const PipelineResult& result);

/// Reads a whole JSON file; throws InputError.
nlohmann::json read_json(const std::string& path);
/// Pretty-prints with a trailing newline; throws InputError when the file cannot be written.
void write_json(const std::string& path, const nlohmann::json& j);

} // namespace uavmc
