#include "uavmc/cli.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "uavmc/serialize.hpp"

namespace uavmc {

namespace {

struct Options {
  std::uint64_t seed = 1;
  std::size_t k = 0;
  std::string area = "1000x1000";
  std::string out;
  std::string scenario_path;
  std::string plan_path;
  std::size_t grid = 64;
  double tol = 1e-5;
  std::size_t max_iters = 2000;
  double dt = 1e-3;
  double max_slot = 0.5;
  std::vector<double> t_list;
  ScenarioDefaults radio;
  double power_dbm = 30.0;
  double beta0_db = -30.0;
  double noise_dbm = -50.0;
};

void parse_area(const std::string& text, double& w, double& h) {
  const auto x = text.find_first_of("xX");
  try {
    if (x == std::string::npos) throw std::invalid_argument("");
    std::size_t used = 0;
    w = std::stod(text.substr(0, x), &used);
    if (used != x) throw std::invalid_argument("");
    const std::string rest = text.substr(x + 1);
    h = std::stod(rest, &used);
    if (used != rest.size()) throw std::invalid_argument("");
  } catch (const std::exception&) {
    throw std::invalid_argument("--area must look like WIDTHxHEIGHT, got '" + text + "'");
  }
  if (!(w >= 0.0 && h >= 0.0)) throw std::invalid_argument("--area sides must be >= 0");
}

PipelineConfig pipeline_config(const Options& o) {
  if (o.grid == 0) throw std::invalid_argument("--grid must be > 0");
  if (!(o.tol > 0.0)) throw std::invalid_argument("--tol must be > 0");
  if (o.max_iters == 0) throw std::invalid_argument("--max-iters must be > 0");
  if (!(o.dt > 0.0)) throw std::invalid_argument("--dt must be > 0");
  if (!(o.max_slot > 0.0)) throw std::invalid_argument("--max-slot must be > 0");
  PipelineConfig cfg;
  cfg.relaxed.grid.coarse = o.grid;
  cfg.relaxed.ellipsoid.tolerance = o.tol;
  cfg.relaxed.ellipsoid.max_iters = o.max_iters;
  cfg.dt = o.dt;
  cfg.max_slot = o.max_slot;
  return cfg;
}

std::filesystem::path out_dir(const Options& o) {
  std::filesystem::path dir = o.out.empty() ? std::filesystem::path(".") : std::filesystem::path(o.out);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw InputError("cannot create output directory " + dir.string());
  return dir;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw InputError("cannot write " + path.string());
  f << text;
}

int cmd_gen(const Options& o, std::ostream& out) {
  double w = 0.0;
  double h = 0.0;
  parse_area(o.area, w, h);
  if (o.k == 0) throw std::invalid_argument("--k must be at least 1");
  ScenarioDefaults d = o.radio;
  d.power_ave = dbm_to_watts(o.power_dbm);
  d.beta0 = db_to_linear(o.beta0_db);
  d.noise_power = dbm_to_watts(o.noise_dbm);
  const Scenario s = generate_random(o.seed, o.k, w, h, d);
  require_valid(s);
  const std::string text = scenario_to_json(s).dump(2) + "\n";
  if (o.out.empty()) {
    out << text;
  } else {
    write_text(o.out, text);
  }
  return kExitOk;
}

int cmd_solve(const Options& o, std::ostream& out) {
  const Scenario s = load_scenario(o.scenario_path);
  const auto cfg = pipeline_config(o);
  const auto r = run_pipeline(s, cfg);
  const auto dir = out_dir(o);
  write_json((dir / "hover_plan.json").string(), hover_plan_to_json(r.hover));
  write_json((dir / "flightplan.json").string(), flightplan_to_json(r.route, r.schedule));
  write_json((dir / "allocation.json").string(), allocation_to_json(r.joint, r.route));
  write_json((dir / "equal_power.json").string(), allocation_to_json(r.equal, r.route));
  write_json((dir / "static.json").string(), static_to_json(r.fixed));
  nlohmann::json reports;
  reports["hover_plan"] = evaluation_to_json(*r.hover_report);
  reports["joint"] = evaluation_to_json(*r.joint_report);
  reports["equal_power"] = evaluation_to_json(*r.equal_report);
  write_json((dir / "evaluation.json").string(), reports);
  const auto summary = summary_to_json(r);
  write_json((dir / "summary.json").string(), summary);
  {
    std::ostringstream csv;
    csv.precision(12);
    write_trajectory_csv(csv, r.schedule, r.route, 0.1);
    write_text(dir / "trajectory.csv", csv.str());
  }
  {
    std::ostringstream csv;
    write_power_schedule_csv(csv, r);
    write_text(dir / "power_schedule.csv", csv.str());
  }
  out << summary.dump(2) << '\n';
  return kExitOk;
}

int cmd_sweep(const Options& o, std::ostream& out, std::ostream& err) {
  const Scenario s = load_scenario(o.scenario_path);
  auto cfg = pipeline_config(o);
  std::vector<double> periods = o.t_list;
  for (double t : periods) {
    if (!(t > 0.0)) throw std::invalid_argument("--t-list entries must be > 0");
  }
  if (periods.empty()) {
    // Default: multiples of the flight time of the relaxed plan.
    const auto hover = solve_p2(s, cfg.relaxed);
    const double t_fly = solve_open_tsp(hover.locations).distance / s.speed;
    for (double f : {2.0, 5.0, 10.0, 20.0}) periods.push_back(t_fly > 0.0 ? f * t_fly : f * s.period);
  }
  const auto sweep = sweep_T(s, periods, cfg);
  for (const auto& w : sweep.warnings) err << "warning: " << w << '\n';
  std::ostringstream csv;
  write_sweep_csv(csv, sweep);
  if (o.out.empty()) {
    out << csv.str();
  } else {
    write_text(out_dir(o) / "sweep.csv", csv.str());
  }
  return kExitOk;
}

int cmd_eval(const Options& o, std::ostream& out) {
  const Scenario s = load_scenario(o.scenario_path);
  if (!(o.dt > 0.0)) throw std::invalid_argument("--dt must be > 0");
  const auto j = read_json(o.plan_path);
  EvaluationReport rep;
  if (j.contains("tau_hover_s")) {
    AllocationSolution a;
    FlightPlan route;
    allocation_from_json(j, a, route);
    rep = evaluate(route, a, s, o.dt);
  } else if (j.contains("durations_s")) {
    rep = evaluate(hover_plan_from_json(j), s, o.dt);
  } else {
    throw InputError(o.plan_path + " is neither a hover plan nor an allocation");
  }
  out << evaluation_to_json(rep).dump(2) << '\n';
  return kExitOk;
}

int cmd_bench_static(const Options& o, std::ostream& out) {
  const Scenario s = load_scenario(o.scenario_path);
  const auto cfg = pipeline_config(o);
  const auto j = static_to_json(benchmark_static(s, cfg.relaxed.grid));
  if (!o.out.empty()) write_json((out_dir(o) / "static.json").string(), j);
  out << j.dump(2) << '\n';
  return kExitOk;
}

int cmd_bench_equal(const Options& o, std::ostream& out) {
  const Scenario s = load_scenario(o.scenario_path);
  const auto cfg = pipeline_config(o);
  const auto hover = solve_p2(s, cfg.relaxed);
  const auto route = build_flightplan(hover.locations, s);
  const auto flight = discretize(route, s, route.t_fly > 0.0 ? default_slot_count(route.t_fly, cfg.max_slot) : 0);
  const auto j = allocation_to_json(benchmark_equal_power(route, flight, s), route);
  if (!o.out.empty()) write_json((out_dir(o) / "equal_power.json").string(), j);
  out << j.dump(2) << '\n';
  return kExitOk;
}

void solver_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--grid", o.grid, "coarse grid nodes per axis")->capture_default_str();
  cmd->add_option("--tol", o.tol, "relative dual gap tolerance")->capture_default_str();
  cmd->add_option("--max-iters", o.max_iters, "dual iteration cap")->capture_default_str();
  cmd->add_option("--dt", o.dt, "evaluator step, s")->capture_default_str();
  cmd->add_option("--max-slot", o.max_slot, "longest flight slot, s")->capture_default_str();
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Capacity planner for a UAV multicasting to ground users"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen", "write a random scenario");
  gen->add_option("--seed", o.seed, "random seed")->capture_default_str();
  gen->add_option("--k", o.k, "number of users")->required();
  gen->add_option("--area", o.area, "user area WIDTHxHEIGHT, m")->capture_default_str();
  gen->add_option("--out", o.out, "scenario file (stdout when omitted)");
  gen->add_option("--altitude", o.radio.altitude, "flight altitude, m")->capture_default_str();
  gen->add_option("--period", o.radio.period, "mission period T, s")->capture_default_str();
  gen->add_option("--speed", o.radio.speed, "maximum speed, m/s")->capture_default_str();
  gen->add_option("--power-dbm", o.power_dbm, "average power budget, dBm")->capture_default_str();
  gen->add_option("--beta0-db", o.beta0_db, "channel gain at 1 m, dB")->capture_default_str();
  gen->add_option("--noise-dbm", o.noise_dbm, "receiver noise power, dBm")->capture_default_str();

  auto* solve = app.add_subcommand("solve", "full pipeline, writes every artifact to --out");
  solve->add_option("scenario", o.scenario_path, "scenario file")->required();
  solve->add_option("--out", o.out, "output directory")->capture_default_str();
  solver_flags(solve, o);

  auto* sweep = app.add_subcommand("sweep", "eta of every scheme over a list of periods");
  sweep->add_option("scenario", o.scenario_path, "scenario file")->required();
  sweep->add_option("--t-list", o.t_list, "periods, s (comma separated)")->delimiter(',');
  sweep->add_option("--out", o.out, "directory for sweep.csv (stdout when omitted)");
  solver_flags(sweep, o);

  auto* eval = app.add_subcommand("eval", "independently certify a hover plan or allocation file");
  eval->add_option("scenario", o.scenario_path, "scenario file")->required();
  eval->add_option("plan", o.plan_path, "hover_plan.json or allocation.json")->required();
  eval->add_option("--dt", o.dt, "integration step, s")->capture_default_str();

  auto* bstatic = app.add_subcommand("bench-static", "best fixed hover point at constant power");
  bstatic->add_option("scenario", o.scenario_path, "scenario file")->required();
  bstatic->add_option("--out", o.out, "output directory");
  solver_flags(bstatic, o);

  auto* bequal = app.add_subcommand("bench-equal", "hover-and-fly with every power at the average");
  bequal->add_option("scenario", o.scenario_path, "scenario file")->required();
  bequal->add_option("--out", o.out, "output directory");
  solver_flags(bequal, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitBadInput;
  }

  try {
    if (*gen) return cmd_gen(o, out);
    if (*solve) return cmd_solve(o, out);
    if (*sweep) return cmd_sweep(o, out, err);
    if (*eval) return cmd_eval(o, out);
    if (*bstatic) return cmd_bench_static(o, out);
    if (*bequal) return cmd_bench_equal(o, out);
  } catch (const ScopeError& e) {
    err << "error: " << e.what() << '\n';
    return kExitScope;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}

} // namespace uavmc
