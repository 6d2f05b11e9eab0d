// kinomesh: minimum-time kinodynamic planning on triangle meshes.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "kinomesh/error.hpp"
#include "kinomesh/evaluation.hpp"
#include "kinomesh/limits_io.hpp"
#include "kinomesh/model_io.hpp"
#include "kinomesh/oracle.hpp"
#include "kinomesh/planner.hpp"

namespace fs = std::filesystem;
using namespace kinomesh;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitConstraintError = 3;
constexpr int kExitUsage = 64;

struct Globals {
  std::string out_dir = ".";
  std::string limits_file;
  std::vector<std::string> overrides;
  bool verbose = false;
};

struct EndpointArgs {
  std::string mesh;
  std::string start;
  std::string goal;
};

Point3 parse_point(const std::string& text) {
  std::stringstream ss(text);
  std::string cell;
  double c[3];
  int n = 0;
  while (std::getline(ss, cell, ',')) {
    if (n == 3) throw ParseError("expected x,y,z, got '" + text + "'", 0);
    c[n++] = parse_value(cell);
  }
  if (n != 3) throw ParseError("expected x,y,z, got '" + text + "'", 0);
  return {c[0], c[1], c[2]};
}

KinodynamicLimits resolve_limits(const Globals& g) {
  std::string path = g.limits_file;
  if (path.empty()) {
    if (const char* env = std::getenv("KINOMESH_LIMITS")) path = env;
  }
  KinodynamicLimits limits;
  if (!path.empty()) limits = load_limits(path);
  for (const auto& o : g.overrides) apply_override(limits, o);
  limits.validate();
  return limits;
}

fs::path out_path(const Globals& g, const std::string& name) {
  fs::create_directories(g.out_dir);
  return fs::path(g.out_dir) / name;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  return out;
}

TransitionTable table_for(const MeshGraph& mesh, const KinodynamicLimits& limits, const std::string& cache,
                          bool verbose) {
  TransitionTable table;
  if (!cache.empty() && load_transition_cache(cache, mesh, limits, table)) {
    if (verbose) std::cerr << "transition table loaded from " << cache << '\n';
    return table;
  }
  table = build_transition_table(mesh, limits);
  if (!cache.empty()) {
    save_transition_cache(cache, mesh, limits, table);
    if (verbose) std::cerr << "transition table cached to " << cache << '\n';
  }
  return table;
}

void add_endpoint_options(CLI::App* cmd, EndpointArgs& a) {
  cmd->add_option("--mesh", a.mesh, "OFF/OBJ file or synth:<kind>[:k=v,...]")->required();
  cmd->add_option("--start", a.start, "start point x,y,z (snapped to the nearest vertex)")->required();
  cmd->add_option("--goal", a.goal, "goal point x,y,z (snapped to the nearest vertex)")->required();
}

struct PlanArgs {
  EndpointArgs ends;
  std::string cache;
  double gap = 1e-6;
  double time_limit = 0.0;
  long node_limit = 0;
  double pi_threshold = 1e-6;
  bool gate = false;
};

int cmd_plan(const Globals& g, const PlanArgs& a) {
  const KinodynamicLimits limits = resolve_limits(g);
  const MeshGraph mesh = load_mesh_spec(a.ends.mesh);
  const auto t0 = std::chrono::steady_clock::now();
  const TransitionTable table = table_for(mesh, limits, a.cache, g.verbose);
  const double t_table = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  PlanOptions opt;
  opt.model.gate_acceleration = a.gate;
  opt.solve.relative_gap = a.gap;
  opt.solve.time_limit = a.time_limit;
  opt.solve.node_limit = a.node_limit;
  const PlanResult r = plan(mesh, parse_point(a.ends.start), parse_point(a.ends.goal), limits, opt, &table);

  std::cout << "start node " << r.request.start << " (snap " << r.start_snap.distance << " m), goal node "
            << r.request.goal << " (snap " << r.goal_snap.distance << " m)\n";
  if (g.verbose) {
    std::cout << "model " << r.model_rows << " rows x " << r.model_cols << " columns; " << r.solve.nodes
              << " nodes, " << r.solve.lp_iterations << " LP iterations\n";
  }
  if (!r.feasible()) {
    std::cout << "status " << to_string(r.status);
    if (!r.infeasible_reason.empty()) std::cout << ": " << r.infeasible_reason;
    std::cout << '\n';
    return r.status == SolveStatus::Infeasible ? kExitInfeasible : kExitError;
  }

  const Trajectory& t = *r.trajectory;
  const ConstraintError pi = constraint_error(t, limits);
  {
    auto out = open_out(out_path(g, "trajectory.json"));
    write_trajectory_json(out, t);
  }
  const Profiles p = profiles(t);
  {
    auto out = open_out(out_path(g, "velocity.csv"));
    write_velocity_csv(out, p);
  }
  {
    auto out = open_out(out_path(g, "acceleration.csv"));
    write_acceleration_csv(out, p);
  }

  std::cout << std::setprecision(9) << "status " << to_string(r.status) << "\nnodes " << t.nodes.size()
            << "\ntime_physical " << t.total_time_physical << " s\ntime_model " << t.total_time_model
            << " s\ngap " << r.solve.gap() << "\npi " << pi.total() << " (yaw " << pi.yaw << ", acceleration "
            << pi.acceleration << ", velocity " << pi.velocity << ")\ndelta " << path_length_excess(t.waypoints)
            << "\ntau " << t_table + r.timings.total() << " s (transitions " << t_table << ", build "
            << r.timings.build << ", solve " << r.timings.solve << ", extract " << r.timings.extract << ")\n";
  if (t.diagnostics.floored_edges > 0) {
    std::cout << "warning: " << t.diagnostics.floored_edges << " edge velocities floored to " << kVelocityFloor
              << '\n';
  }
  if (r.status != SolveStatus::Optimal && r.status != SolveStatus::GapLimit) return kExitError;
  return pi.total() <= a.pi_threshold ? kExitOk : kExitConstraintError;
}

int cmd_transitions(const Globals& g, const std::string& mesh_spec, const std::string& cache) {
  const KinodynamicLimits limits = resolve_limits(g);
  const MeshGraph mesh = load_mesh_spec(mesh_spec);
  const auto t0 = std::chrono::steady_clock::now();
  const TransitionTable table = build_transition_table(mesh, limits);
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  {
    auto out = open_out(out_path(g, "edge_pitch.csv"));
    write_edge_pitch_csv(out, mesh, table);
  }
  {
    auto out = open_out(out_path(g, "forbidden_pairs.csv"));
    write_forbidden_csv(out, table);
  }
  const std::string cache_path = cache.empty() ? out_path(g, "transitions.json").string() : cache;
  save_transition_cache(cache_path, mesh, limits, table);
  int admissible = 0;
  for (int e = 0; e < mesh.num_edges(); ++e) admissible += table.pitch_ok(e) ? 1 : 0;
  std::cout << mesh.num_vertices() << " vertices, " << mesh.faces().size() << " faces, " << mesh.num_edges()
            << " directed edges (" << admissible << " pitch-admissible), " << table.forbidden_pairs().size()
            << " forbidden pairs, " << std::setprecision(4) << dt * 1e3 << " ms\n";
  return kExitOk;
}

int cmd_export(const Globals& g, const EndpointArgs& a, const std::string& format_text, std::string output,
               bool gate) {
  const ModelFormat format = parse_model_format(format_text);
  const KinodynamicLimits limits = resolve_limits(g);
  const MeshGraph mesh = load_mesh_spec(a.mesh);
  const TransitionTable table = build_transition_table(mesh, limits);
  PlanRequest req{nearest_vertex(mesh, parse_point(a.start)).node, nearest_vertex(mesh, parse_point(a.goal)).node,
                  limits};
  ModelOptions mo;
  mo.gate_acceleration = gate;
  MilpModel model;
  try {
    model = build_model(mesh, table, req, mo);
  } catch (const InfeasibleInput& e) {
    std::cout << "infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  }
  if (output.empty()) output = out_path(g, format == ModelFormat::Lp ? "model.lp" : "model.mps").string();
  auto out = open_out(output);
  export_model(out, model, format);
  std::cout << "wrote " << output << ": " << model.num_rows() << " rows, " << model.num_vars() << " columns\n";
  return kExitOk;
}

int cmd_eval(const Globals& g, const std::string& scenarios_path, const std::string& sets_path,
             std::string results) {
  std::ifstream sin(scenarios_path);
  if (!sin) throw Error("cannot open scenario file '" + scenarios_path + "'");
  const std::vector<ScenarioSpec> scenarios = read_scenarios(sin);
  std::vector<ConstraintSet> sets = standard_constraint_sets();
  if (!sets_path.empty()) {
    std::ifstream cin(sets_path);
    if (!cin) throw Error("cannot open constraint set file '" + sets_path + "'");
    sets = read_constraint_sets(cin);
  }
  for (const auto& s : sets) s.limits.validate();

  BatchOptions opt;
  opt.base_dir = fs::path(scenarios_path).parent_path().string();
  if (g.verbose) {
    opt.on_row = [](const MetricsRow& r) {
      std::cerr << r.mesh << " scenario " << r.scenario << " set " << r.constraint_set << " run " << r.run << ": "
                << r.status << " pi=" << r.pi.total() << " tau=" << r.tau() << '\n';
    };
  }
  const std::vector<MetricsRow> rows = run_batch(scenarios, sets, opt);
  if (results.empty()) results = out_path(g, "results.csv").string();
  {
    auto out = open_out(results);
    write_results_csv(out, rows);
  }
  {
    auto out = open_out(fs::path(results).replace_filename("summary.csv"));
    write_summary_csv(out, rows);
  }
  int failed = 0;
  for (const auto& r : rows) failed += r.ok() ? 0 : 1;
  std::cout << rows.size() << " rows written to " << results << " (" << failed << " not solved)\n";
  return kExitOk;
}

int cmd_oracle(const Globals& g, const EndpointArgs& a, int grid, int max_nodes) {
  const KinodynamicLimits limits = resolve_limits(g);
  const MeshGraph mesh = load_mesh_spec(a.mesh);
  const TransitionTable table = build_transition_table(mesh, limits);
  const PlanResult r = plan(mesh, parse_point(a.start), parse_point(a.goal), limits, {}, &table);
  const OracleResult o = run_oracle(mesh, table, r.request, grid, max_nodes);
  {
    auto out = open_out(out_path(g, "oracle_paths.csv"));
    write_oracle_csv(out, o);
  }
  auto print_path = [](const std::vector<int>& p) {
    for (size_t i = 0; i < p.size(); ++i) std::cout << (i ? " " : "") << p[i];
  };
  std::cout << std::setprecision(9) << o.paths.size() << " admissible paths, grid K=" << o.grid_size << '\n';
  std::cout << "oracle best " << o.best_time << " s: ";
  print_path(o.best_path);
  std::cout << '\n';
  if (!r.feasible()) {
    std::cout << "planner " << to_string(r.status) << '\n';
    return std::isfinite(o.best_time) ? kExitError : kExitInfeasible;
  }
  const Trajectory& t = *r.trajectory;
  const ProfileResult dp = optimal_profile_dp(mesh, t.nodes, limits, grid);
  std::cout << "planner objective " << r.solve.objective << " s, physical " << t.total_time_physical
            << " s, path re-timed by oracle " << dp.time << " s: ";
  print_path(t.nodes);
  std::cout << '\n';
  const double excess = std::isfinite(o.best_time) ? dp.time / o.best_time - 1.0 : kInf;
  std::cout << "planner path excess over oracle optimum " << excess * 100.0 << "%\n";
  return kExitOk;
}

int cmd_synth(const Globals& g, const std::string& spec, std::string output) {
  const MeshGraph mesh = synth_mesh(parse_synth_spec(spec));
  if (output.empty()) output = out_path(g, "mesh.off").string();
  auto out = open_out(output);
  write_off(out, mesh);
  std::cout << "wrote " << output << ": " << mesh.num_vertices() << " vertices, " << mesh.faces().size()
            << " faces\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minimum-time kinodynamic path planning on triangle meshes"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--out-dir", g.out_dir, "directory for output files")->capture_default_str();
  app.add_option("--limits", g.limits_file, "key=value limits file (default: $KINOMESH_LIMITS)");
  app.add_option("--set", g.overrides, "override one limit, e.g. --set v_max=0.9")->take_all();
  app.add_flag("-v,--verbose", g.verbose, "print progress to stderr");

  PlanArgs plan_args;
  auto* plan_cmd = app.add_subcommand("plan", "plan a minimum-time trajectory");
  add_endpoint_options(plan_cmd, plan_args.ends);
  plan_cmd->add_option("--transitions-cache", plan_args.cache, "read/write the transition table here");
  plan_cmd->add_option("--gap", plan_args.gap, "relative optimality gap")->capture_default_str();
  plan_cmd->add_option("--time-limit", plan_args.time_limit, "solver time limit in seconds (0 = none)");
  plan_cmd->add_option("--node-limit", plan_args.node_limit, "branch-and-bound node limit (0 = none)");
  plan_cmd->add_option("--pi-threshold", plan_args.pi_threshold, "exit 3 when the constraint error exceeds this")
      ->capture_default_str();
  plan_cmd->add_flag("--gate-acceleration", plan_args.gate, "apply the acceleration cap on selected edges only");

  std::string tr_mesh, tr_cache;
  auto* tr_cmd = app.add_subcommand("transitions", "precompute edge pitch and forbidden transitions");
  tr_cmd->add_option("--mesh", tr_mesh, "mesh file or synth spec")->required();
  tr_cmd->add_option("--cache", tr_cache, "cache file (default <out-dir>/transitions.json)");

  EndpointArgs ex_args;
  std::string ex_format = "lp", ex_output;
  bool ex_gate = false;
  auto* ex_cmd = app.add_subcommand("export-model", "write the model in LP or MPS format");
  add_endpoint_options(ex_cmd, ex_args);
  ex_cmd->add_option("--format", ex_format, "lp or mps")->capture_default_str();
  ex_cmd->add_option("-o,--output", ex_output, "output file (default <out-dir>/model.<format>)");
  ex_cmd->add_flag("--gate-acceleration", ex_gate, "apply the acceleration cap on selected edges only");

  std::string ev_scenarios, ev_sets, ev_results;
  auto* ev_cmd = app.add_subcommand("eval", "run a scenario x constraint-set batch");
  ev_cmd->add_option("--scenarios", ev_scenarios, "scenario CSV")->required();
  ev_cmd->add_option("--sets", ev_sets, "constraint set CSV (default: the three built-in sets)");
  ev_cmd->add_option("--results", ev_results, "results CSV (default <out-dir>/results.csv)");

  EndpointArgs or_args;
  int or_grid = kOracleGridSize, or_max_nodes = kOracleNodeLimit;
  auto* or_cmd = app.add_subcommand("oracle", "compare the planner against path enumeration on a small mesh");
  add_endpoint_options(or_cmd, or_args);
  or_cmd->add_option("--grid", or_grid, "velocity grid size K")->capture_default_str();
  or_cmd->add_option("--max-nodes", or_max_nodes, "refuse meshes with more vertices")->capture_default_str();

  std::string sy_spec, sy_output;
  auto* sy_cmd = app.add_subcommand("synth-mesh", "write a synthetic terrain mesh as OFF");
  sy_cmd->add_option("spec", sy_spec, "synth:<plane-grid|ridge|pothole-field>[:k=v,...]")->required();
  sy_cmd->add_option("-o,--output", sy_output, "output file (default <out-dir>/mesh.off)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*plan_cmd) return cmd_plan(g, plan_args);
    if (*tr_cmd) return cmd_transitions(g, tr_mesh, tr_cache);
    if (*ex_cmd) return cmd_export(g, ex_args, ex_format, ex_output, ex_gate);
    if (*ev_cmd) return cmd_eval(g, ev_scenarios, ev_sets, ev_results);
    if (*or_cmd) return cmd_oracle(g, or_args, or_grid, or_max_nodes);
    if (*sy_cmd) return cmd_synth(g, sy_spec, sy_output);
  } catch (const InfeasibleInput& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitUsage;
}
