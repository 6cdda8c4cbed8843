#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "uavmc/alloc.hpp"
#include "uavmc/evaluate.hpp"
#include "uavmc/flightplan.hpp"
#include "uavmc/relaxed.hpp"

namespace uavmc {

struct PipelineConfig {
  RelaxedConfig relaxed;
  InteriorPointConfig interior;
  double max_slot = 0.5;    // s, caps delta_t when slots == 0
  std::size_t slots = 0;    // fixed N; 0 picks the smallest N meeting max_slot
  double dt = 1e-3;         // evaluator step, s
  bool certify = true;      // run the evaluator on every output
};

/// Everything one scenario produces, stage by stage.
struct PipelineResult {
  HoverPlan hover;
  FlightPlan route;
  Schedule schedule;
  DiscretizedFlight flight;
  AllocationSolution joint;
  AllocationSolution equal;
  StaticResult fixed;
  std::optional<EvaluationReport> hover_report;
  std::optional<EvaluationReport> joint_report;
  std::optional<EvaluationReport> equal_report;
};

/// Hover-and-fly stages for an already solved relaxed plan. Throws
/// ScopeError when the scenario period is shorter than the flight time.
PipelineResult complete_pipeline(const Scenario& scenario, const HoverPlan& hover,
                                 const StaticResult& fixed, const PipelineConfig& config);

/// Relaxed solve, route, joint allocation and both benchmarks.
PipelineResult run_pipeline(const Scenario& scenario, const PipelineConfig& config = {});

struct SweepRow {
  double period = 0.0;
  double eta_static = 0.0;
  double eta_equal = 0.0;
  double eta_joint = 0.0;
  double eta_star = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<std::string> warnings; // one per skipped period
  double t_fly = 0.0;
};

/// One row per period. The relaxed problem and the static benchmark do not
/// depend on T, so both are solved once; periods shorter than the flight
/// time are skipped with a warning.
SweepResult sweep_T(const Scenario& scenario, const std::vector<double>& periods,
                    const PipelineConfig& config = {});

/// Header `T,eta_static,eta_equal,eta_joint,eta_star` and one line per row.
void write_sweep_csv(std::ostream& out, const SweepResult& sweep);

} // namespace uavmc
