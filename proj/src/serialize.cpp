#include "uavmc/serialize.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace uavmc {

using nlohmann::json;

namespace {

json points(const std::vector<UavPosition>& ps) {
  json a = json::array();
  for (const auto& p : ps) a.push_back({p.x, p.y});
  return a;
}

std::vector<UavPosition> points_from(const json& a) {
  std::vector<UavPosition> out;
  for (const auto& p : a) out.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  return out;
}

template <class F>
auto guarded(const char* what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed ") + what + ": " + e.what());
  }
}

} // namespace

json scenario_to_json(const Scenario& s) {
  json users = json::array();
  for (const auto& u : s.users) users.push_back({u.x, u.y});
  json j;
  j["users"] = users;
  j["altitude_m"] = s.altitude;
  j["period_s"] = s.period;
  j["speed_mps"] = s.speed;
  j["power_ave_dbm"] = s.power_ave > 0.0 ? json(watts_to_dbm(s.power_ave)) : json(nullptr);
  j["beta0_db"] = linear_to_db(s.beta0);
  j["noise_dbm"] = watts_to_dbm(s.noise_power);
  return j;
}

Scenario scenario_from_json(const json& j) {
  return guarded("scenario", [&] {
    Scenario s;
    for (const auto& u : j.at("users")) s.users.push_back({u.at(0).get<double>(), u.at(1).get<double>()});
    s.altitude = j.at("altitude_m").get<double>();
    s.period = j.at("period_s").get<double>();
    s.speed = j.at("speed_mps").get<double>();
    const auto& p = j.at("power_ave_dbm");
    s.power_ave = p.is_null() ? 0.0 : dbm_to_watts(p.get<double>());
    s.beta0 = db_to_linear(j.at("beta0_db").get<double>());
    s.noise_power = dbm_to_watts(j.at("noise_dbm").get<double>());
    const auto report = validate(s);
    if (!report.ok()) {
      std::string msg = "invalid scenario:";
      for (const auto& v : report.violations) msg += " " + v + ";";
      throw InputError(msg);
    }
    return s;
  });
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InputError(path + ": " + e.what());
  }
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << j.dump(2) << '\n';
}

Scenario load_scenario(const std::string& path) { return scenario_from_json(read_json(path)); }

void save_scenario(const std::string& path, const Scenario& s) { write_json(path, scenario_to_json(s)); }

json hover_plan_to_json(const HoverPlan& p) {
  json j;
  j["period_s"] = p.period;
  j["locations_m"] = points(p.locations);
  j["durations_s"] = p.durations;
  j["powers_w"] = p.powers;
  j["per_user_rate"] = p.per_user_rate;
  j["eta_star"] = p.eta_star;
  j["dual_value"] = p.dual_value;
  j["duality_gap"] = p.duality_gap;
  j["dual"] = {{"lambdas", p.dual.lambdas}, {"mu", p.dual.mu}};
  j["iterations"] = p.iterations;
  j["converged"] = p.converged;
  j["power_cap_active"] = p.power_cap_active;
  return j;
}

HoverPlan hover_plan_from_json(const json& j) {
  return guarded("hover plan", [&] {
    HoverPlan p;
    p.period = j.at("period_s").get<double>();
    p.locations = points_from(j.at("locations_m"));
    p.durations = j.at("durations_s").get<std::vector<double>>();
    p.powers = j.at("powers_w").get<std::vector<double>>();
    p.per_user_rate = j.value("per_user_rate", std::vector<double>{});
    p.eta_star = j.value("eta_star", 0.0);
    p.dual_value = j.value("dual_value", 0.0);
    p.duality_gap = j.value("duality_gap", 0.0);
    p.iterations = j.value("iterations", std::size_t{0});
    p.converged = j.value("converged", true);
    return p;
  });
}

json flightplan_to_json(const FlightPlan& r, const Schedule& schedule) {
  json j;
  j["hover_locations_m"] = points(r.hover_locations);
  j["order"] = r.order;
  j["total_distance_m"] = r.total_distance;
  j["fly_times_s"] = r.fly_times;
  j["t_fly_s"] = r.t_fly;
  j["speed_mps"] = r.speed;
  j["heuristic_order"] = r.heuristic;
  json segs = json::array();
  for (const auto& s : r.segments()) {
    segs.push_back({{"from", {s.from.x, s.from.y}}, {"to", {s.to.x, s.to.y}},
                    {"length_m", s.length}, {"duration_s", s.duration}});
  }
  j["segments"] = segs;
  json subs = json::array();
  for (std::size_t i = 0; i < schedule.sub_periods.size(); ++i) {
    subs.push_back({{"kind", schedule.is_hover(i) ? "hover" : "fly"},
                    {"begin_s", schedule.sub_periods[i].begin},
                    {"end_s", schedule.sub_periods[i].end}});
  }
  j["sub_periods"] = subs;
  return j;
}

json allocation_to_json(const AllocationSolution& a, const FlightPlan& r) {
  json j;
  j["hover_locations_m"] = points(r.hover_locations);
  j["order"] = r.order;
  j["speed_mps"] = r.speed;
  j["tau_hover_s"] = a.tau_hover;
  j["energy_hover_j"] = a.energy_hover;
  j["p_hover_w"] = a.p_hover;
  j["delta_t_s"] = a.delta_t;
  j["p_fly_w"] = a.p_fly;
  j["per_user_rate"] = a.per_user_rate;
  j["eta"] = a.eta;
  j["kkt_residual"] = a.kkt_residual;
  j["converged"] = a.converged;
  return j;
}

void allocation_from_json(const json& j, AllocationSolution& a, FlightPlan& r) {
  guarded("allocation", [&] {
    r = FlightPlan{};
    r.hover_locations = points_from(j.at("hover_locations_m"));
    r.order = j.at("order").get<std::vector<std::size_t>>();
    r.speed = j.at("speed_mps").get<double>();
    for (std::size_t o : r.order) {
      if (o >= r.hover_locations.size()) throw InputError("allocation order index out of range");
    }
    a = AllocationSolution{};
    a.tau_hover = j.at("tau_hover_s").get<std::vector<double>>();
    a.energy_hover = j.at("energy_hover_j").get<std::vector<double>>();
    a.p_hover = j.value("p_hover_w", std::vector<double>{});
    a.delta_t = j.at("delta_t_s").get<double>();
    a.p_fly = j.at("p_fly_w").get<std::vector<double>>();
    a.per_user_rate = j.value("per_user_rate", std::vector<double>{});
    a.eta = j.value("eta", 0.0);
    a.kkt_residual = j.value("kkt_residual", 0.0);
    a.converged = j.value("converged", true);
    return 0;
  });
}

json evaluation_to_json(const EvaluationReport& r) {
  return {{"per_user_avg_rate", r.per_user_avg_rate},
          {"min_rate", r.min_rate},
          {"energy_used_j", r.energy_used},
          {"max_speed_observed_mps", r.max_speed_observed},
          {"constraint_flags", r.constraint_flags}};
}

json static_to_json(const StaticResult& r) {
  return {{"position_m", {r.position.x, r.position.y}}, {"eta_static", r.eta}};
}

json summary_to_json(const PipelineResult& r) {
  json j;
  j["eta_static"] = r.fixed.eta;
  j["eta_equal"] = r.equal.eta;
  j["eta_joint"] = r.joint.eta;
  j["eta_star"] = r.hover.eta_star;
  j["dual_value"] = r.hover.dual_value;
  j["duality_gap"] = r.hover.duality_gap;
  j["gamma"] = r.hover.size();
  j["t_fly_s"] = r.route.t_fly;
  j["slots"] = r.flight.slots;
  j["relaxed_converged"] = r.hover.converged;
  j["relaxed_iterations"] = r.hover.iterations;
  j["joint_converged"] = r.joint.converged;
  j["joint_kkt_residual"] = r.joint.kkt_residual;
  j["heuristic_order"] = r.route.heuristic;
  if (r.joint_report) {
    j["certified"] = r.hover_report->ok() && r.joint_report->ok() && r.equal_report->ok();
  }
  return j;
}

void write_power_schedule_csv(std::ostream& out, const PipelineResult& r) {
  out << "t,x,y,p\n" << std::setprecision(12);
  const auto& sched = r.schedule;
  const auto& a = r.joint;
  double flown = 0.0;
  for (std::size_t i = 0; i < sched.sub_periods.size(); ++i) {
    const auto& iv = sched.sub_periods[i];
    const std::size_t phi = i / 2;
    if (sched.is_hover(i)) {
      if (iv.end > iv.begin) {
        const auto p = r.route.visited(phi);
        out << iv.begin << ',' << p.x << ',' << p.y << ',' << a.p_hover[phi] << '\n';
      }
      continue;
    }
    // Slot boundaries inside this leg, on the flight-time clock.
    const double leg = iv.end - iv.begin;
    const auto a0 = r.route.visited(phi);
    const auto b0 = r.route.visited(phi + 1);
    double local = 0.0;
    while (local < leg && a.delta_t > 0.0) {
      auto j = static_cast<std::size_t>((flown + local) / a.delta_t + 1e-12);
      j = std::min(j, a.p_fly.size() - 1);
      const double f = local / leg;
      out << iv.begin + local << ',' << a0.x + (b0.x - a0.x) * f << ',' << a0.y + (b0.y - a0.y) * f
          << ',' << a.p_fly[j] << '\n';
      const double next = static_cast<double>(j + 1) * a.delta_t - flown;
      if (next <= local || j + 1 == a.p_fly.size()) break;
      local = next;
    }
    flown += leg;
  }
  const auto last = r.route.visited(r.route.size() - 1);
  out << sched.period << ',' << last.x << ',' << last.y << ','
      << (a.p_hover.empty() ? 0.0 : a.p_hover.back()) << '\n';
}

} // namespace uavmc
