#include "uavmc/pipeline.hpp"

#include <iomanip>
#include <ostream>
#include <sstream>

namespace uavmc {

PipelineResult complete_pipeline(const Scenario& s, const HoverPlan& hover, const StaticResult& fixed,
                                 const PipelineConfig& cfg) {
  PipelineResult r;
  r.hover = hover;
  r.fixed = fixed;
  r.route = build_flightplan(hover.locations, s);
  std::size_t n = 0;
  if (r.route.t_fly > 0.0) n = cfg.slots > 0 ? cfg.slots : default_slot_count(r.route.t_fly, cfg.max_slot);
  r.flight = discretize(r.route, s, n);
  r.joint = optimize_joint(r.flight, r.route, s, cfg.interior);
  r.equal = benchmark_equal_power(r.route, r.flight, s);
  r.schedule = make_schedule(r.route, r.joint.tau_hover, s.period);
  if (cfg.certify) {
    r.hover_report = evaluate(r.hover, s, cfg.dt);
    r.joint_report = evaluate(r.route, r.joint, s, cfg.dt);
    r.equal_report = evaluate(r.route, r.equal, s, cfg.dt);
  }
  return r;
}

PipelineResult run_pipeline(const Scenario& s, const PipelineConfig& cfg) {
  const HoverPlan hover = solve_p2(s, cfg.relaxed);
  const StaticResult fixed = benchmark_static(s, cfg.relaxed.grid);
  return complete_pipeline(s, hover, fixed, cfg);
}

SweepResult sweep_T(const Scenario& s, const std::vector<double>& periods, const PipelineConfig& cfg) {
  SweepResult out;
  const HoverPlan hover = solve_p2(s, cfg.relaxed);
  const StaticResult fixed = benchmark_static(s, cfg.relaxed.grid);
  PipelineConfig light = cfg;
  light.certify = false;
  for (double T : periods) {
    Scenario at = s;
    at.period = T;
    HoverPlan scaled = hover;
    // Same time shares at the new period.
    for (auto& d : scaled.durations) d *= T / s.period;
    scaled.period = T;
    try {
      const auto r = complete_pipeline(at, scaled, fixed, light);
      out.rows.push_back({T, fixed.eta, r.equal.eta, r.joint.eta, hover.eta_star});
    } catch (const ScopeError& e) {
      std::ostringstream msg;
      msg << "skipping T = " << T << ": " << e.what();
      out.warnings.push_back(msg.str());
    }
  }
  out.t_fly = solve_open_tsp(hover.locations).distance / s.speed;
  return out;
}

void write_sweep_csv(std::ostream& out, const SweepResult& sweep) {
  out << "T,eta_static,eta_equal,eta_joint,eta_star\n";
  out << std::setprecision(10);
  for (const auto& r : sweep.rows) {
    out << r.period << ',' << r.eta_static << ',' << r.eta_equal << ',' << r.eta_joint << ','
        << r.eta_star << '\n';
  }
}

} // namespace uavmc
