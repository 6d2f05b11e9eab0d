#include "kinomesh/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

#include "kinomesh/error.hpp"
#include "kinomesh/limits_io.hpp"

namespace kinomesh {

ConstraintError constraint_error(const Trajectory& t, const KinodynamicLimits& limits) {
  ConstraintError r;
  const auto& w = t.waypoints;
  for (size_t i = 0; i + 2 < w.size(); ++i) {
    const double angle = std::acos(yaw_cosine(w[i + 1] - w[i], w[i + 2] - w[i + 1]));
    r.yaw += std::max(0.0, std::abs(angle) - limits.theta_max_yaw);
  }
  for (double a : t.edge_accelerations) r.acceleration += std::max(0.0, std::abs(a) - limits.a_max);
  for (double v : t.node_velocities) r.velocity += std::max(0.0, v - limits.v_max);
  return r;
}

double path_length_excess(const std::vector<Point3>& w) {
  if (w.size() < 2) throw DomainError("path length excess needs at least two waypoints");
  const double chord = (w.back() - w.front()).norm();
  if (chord == 0.0) throw DomainError("path length excess is undefined for coincident endpoints");
  double length = 0.0;
  for (size_t i = 0; i + 1 < w.size(); ++i) length += (w[i + 1] - w[i]).norm();
  return (length - chord) / chord;
}

std::vector<double> min_max_normalize(const std::vector<double>& column) {
  double lo = kInf;
  double hi = -kInf;
  for (double v : column) {
    if (!std::isfinite(v)) continue;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  std::vector<double> out(column.size(), std::nan(""));
  for (size_t i = 0; i < column.size(); ++i) {
    if (!std::isfinite(column[i])) continue;
    out[i] = hi > lo ? (column[i] - lo) / (hi - lo) : 0.0;
  }
  return out;
}

// ---- synthetic meshes ------------------------------------------------------

namespace {

// Uniform in [0, 1) from the top 53 bits; stable across standard libraries.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

MeshGraph synth_mesh(const SynthParams& p) {
  if (p.nx < 2 || p.ny < 2) throw ValidationError("synthetic grid needs nx, ny >= 2");
  if (!(p.spacing > 0.0)) throw ValidationError("synthetic grid spacing must be > 0");
  const double ex = (p.nx - 1) * p.spacing;
  const double ey = (p.ny - 1) * p.spacing;

  std::vector<Point3> holes;
  if (p.kind == SynthKind::PotholeField) {
    if (!(p.sigma > 0.0) || p.potholes < 0) throw ValidationError("pothole-field needs sigma > 0, potholes >= 0");
    std::mt19937_64 rng(p.seed);
    for (int k = 0; k < p.potholes; ++k) {
      const double x = ex * (0.2 + 0.6 * unit(rng));
      const double y = ey * (0.2 + 0.6 * unit(rng));
      holes.emplace_back(x, y, 0.0);
    }
  }
  if (p.kind == SynthKind::Ridge && !(p.width > 0.0)) throw ValidationError("ridge width must be > 0");
  const double center = std::isnan(p.center) ? 0.5 * ex : p.center;

  std::vector<Point3> vertices;
  vertices.reserve(static_cast<size_t>(p.nx * p.ny));
  for (int j = 0; j < p.ny; ++j) {
    for (int i = 0; i < p.nx; ++i) {
      const double x = i * p.spacing;
      const double y = j * p.spacing;
      double z = 0.0;
      if (p.kind == SynthKind::Ridge) {
        const double u = (x - center) / p.width;
        if (std::abs(u) < 0.5) z = p.amplitude * std::pow(std::cos(M_PI * u), 2);
      } else if (p.kind == SynthKind::PotholeField) {
        for (const Point3& c : holes) {
          const double r2 = (x - c.x()) * (x - c.x()) + (y - c.y()) * (y - c.y());
          z -= p.depth * std::exp(-r2 / (2.0 * p.sigma * p.sigma));
        }
      }
      vertices.emplace_back(x, y, z);
    }
  }
  std::vector<Face> faces;
  faces.reserve(static_cast<size_t>(2 * (p.nx - 1) * (p.ny - 1)));
  for (int j = 0; j + 1 < p.ny; ++j) {
    for (int i = 0; i + 1 < p.nx; ++i) {
      const int v00 = j * p.nx + i;
      const int v10 = v00 + 1;
      const int v01 = v00 + p.nx;
      const int v11 = v01 + 1;
      if ((i + j) % 2 == 0) {
        faces.push_back({v00, v10, v11});
        faces.push_back({v00, v11, v01});
      } else {
        faces.push_back({v00, v10, v01});
        faces.push_back({v10, v11, v01});
      }
    }
  }
  return MeshGraph::from_faces(std::move(vertices), std::move(faces));
}

bool is_synth_spec(const std::string& text) { return text.rfind("synth:", 0) == 0; }

SynthParams parse_synth_spec(const std::string& spec) {
  if (!is_synth_spec(spec)) throw ParseError("synthetic mesh spec must start with 'synth:': " + spec, 0);
  const std::string rest = spec.substr(6);
  const size_t colon = rest.find(':');
  const std::string kind = rest.substr(0, colon);
  SynthParams p;
  if (kind == "plane-grid") p.kind = SynthKind::PlaneGrid;
  else if (kind == "ridge") p.kind = SynthKind::Ridge;
  else if (kind == "pothole-field") p.kind = SynthKind::PotholeField;
  else throw ParseError("unknown synthetic mesh kind '" + kind + "'", 0);
  if (colon == std::string::npos) return p;

  std::string params = rest.substr(colon + 1);
  std::replace(params.begin(), params.end(), ';', ',');
  std::stringstream ss(params);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const size_t eq = item.find('=');
    if (eq == std::string::npos) throw ParseError("expected key=value in '" + spec + "'", 0);
    const std::string key = item.substr(0, eq);
    const double v = parse_value(item.substr(eq + 1));
    if (key == "nx") p.nx = static_cast<int>(v);
    else if (key == "ny") p.ny = static_cast<int>(v);
    else if (key == "spacing") p.spacing = v;
    else if (key == "amplitude") p.amplitude = v;
    else if (key == "width") p.width = v;
    else if (key == "center") p.center = v;
    else if (key == "potholes") p.potholes = static_cast<int>(v);
    else if (key == "depth") p.depth = v;
    else if (key == "sigma") p.sigma = v;
    else if (key == "seed") p.seed = static_cast<std::uint64_t>(v);
    else throw ParseError("unknown synthetic mesh parameter '" + key + "'", 0);
  }
  return p;
}

MeshGraph load_mesh_spec(const std::string& spec, const std::string& base_dir) {
  if (is_synth_spec(spec)) return synth_mesh(parse_synth_spec(spec));
  std::filesystem::path path(spec);
  if (path.is_relative() && !base_dir.empty()) path = std::filesystem::path(base_dir) / path;
  return load_mesh(path.string());
}

// ---- CSV files -------------------------------------------------------------

namespace {

std::string trim(const std::string& s) {
  const size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

// Reads a header-led CSV, returning rows keyed by the expected columns.
struct CsvTable {
  std::vector<std::vector<std::string>> rows;
  std::vector<int> line;
};

CsvTable read_csv(std::istream& in, const std::vector<std::string>& columns, const char* what) {
  std::string text;
  int lineno = 0;
  std::vector<int> index;
  CsvTable t;
  while (std::getline(in, text)) {
    ++lineno;
    const std::string trimmed = trim(text);
    if (trimmed.empty() || trimmed[0] == '#') continue;
    const auto cells = split_csv(trimmed);
    if (index.empty()) {
      for (const auto& c : columns) {
        const auto it = std::find(cells.begin(), cells.end(), c);
        if (it == cells.end()) throw ParseError(std::string(what) + " header lacks column '" + c + "'", lineno);
        index.push_back(static_cast<int>(it - cells.begin()));
      }
      continue;
    }
    std::vector<std::string> row;
    for (int i : index) {
      if (i >= static_cast<int>(cells.size())) throw ParseError(std::string(what) + " row is short", lineno);
      row.push_back(cells[static_cast<size_t>(i)]);
    }
    t.rows.push_back(std::move(row));
    t.line.push_back(lineno);
  }
  if (index.empty()) throw ParseError(std::string(what) + " file has no header", 0);
  return t;
}

double cell_value(const std::string& s, int line) {
  try {
    return parse_value(s);
  } catch (const ParseError& e) {
    throw ParseError(e.what(), line);
  }
}

int cell_int(const std::string& s, int line) {
  const double v = cell_value(s, line);
  if (v != std::floor(v)) throw ParseError("expected an integer, got '" + s + "'", line);
  return static_cast<int>(v);
}

}  // namespace

std::vector<ConstraintSet> standard_constraint_sets() {
  auto make = [](int id, double yaw, double a, double v) {
    ConstraintSet s;
    s.id = id;
    s.limits.theta_max_yaw = yaw;
    s.limits.a_max = a;
    s.limits.v_max = v;
    return s;
  };
  return {make(1, M_PI / 3.0, 0.5, 0.9), make(2, M_PI / 2.0, 0.9, 0.5), make(3, M_PI / 3.0, 0.5, 0.5)};
}

std::vector<ConstraintSet> read_constraint_sets(std::istream& in) {
  static const std::vector<std::string> cols = {"id",    "theta_max_yaw", "theta_max_pitch", "phi_max",
                                                "a_max", "v_max",         "kappa",           "gamma"};
  const CsvTable t = read_csv(in, cols, "constraint set");
  std::vector<ConstraintSet> sets;
  for (size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    const int line = t.line[r];
    ConstraintSet s;
    s.id = cell_int(row[0], line);
    for (size_t c = 1; c < cols.size(); ++c) set_limit(s.limits, cols[c], cell_value(row[c], line));
    for (const auto& other : sets) {
      if (other.id == s.id) throw ParseError("duplicate constraint set id " + row[0], line);
    }
    sets.push_back(s);
  }
  return sets;
}

void write_constraint_sets(std::ostream& out, const std::vector<ConstraintSet>& sets) {
  out << "id,theta_max_yaw,theta_max_pitch,phi_max,a_max,v_max,kappa,gamma\n" << std::setprecision(17);
  for (const auto& s : sets) {
    const auto& l = s.limits;
    out << s.id << ',' << l.theta_max_yaw << ',' << l.theta_max_pitch << ',' << l.phi_max << ',' << l.a_max << ','
        << l.v_max << ',' << l.kappa << ',' << l.gamma << '\n';
  }
}

std::vector<ScenarioSpec> read_scenarios(std::istream& in) {
  static const std::vector<std::string> cols = {"mesh",   "start_x", "start_y", "start_z",        "goal_x",
                                                "goal_y", "goal_z",  "constraint_set", "runs"};
  const CsvTable t = read_csv(in, cols, "scenario");
  std::vector<ScenarioSpec> out;
  for (size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    const int line = t.line[r];
    ScenarioSpec s;
    s.mesh = row[0];
    if (s.mesh.empty()) throw ParseError("empty mesh cell", line);
    s.start = {cell_value(row[1], line), cell_value(row[2], line), cell_value(row[3], line)};
    s.goal = {cell_value(row[4], line), cell_value(row[5], line), cell_value(row[6], line)};
    s.constraint_set = row[7] == "*" ? kAllSets : cell_int(row[7], line);
    s.runs = cell_int(row[8], line);
    if (s.runs < 1) throw ParseError("runs must be >= 1", line);
    out.push_back(s);
  }
  return out;
}

void write_scenarios(std::ostream& out, const std::vector<ScenarioSpec>& scenarios) {
  out << "mesh,start_x,start_y,start_z,goal_x,goal_y,goal_z,constraint_set,runs\n" << std::setprecision(17);
  for (const auto& s : scenarios) {
    out << s.mesh << ',' << s.start.x() << ',' << s.start.y() << ',' << s.start.z() << ',' << s.goal.x() << ','
        << s.goal.y() << ',' << s.goal.z() << ',';
    if (s.constraint_set == kAllSets) out << '*';
    else out << s.constraint_set;
    out << ',' << s.runs << '\n';
  }
}

// ---- batch -----------------------------------------------------------------

std::vector<MetricsRow> run_batch(const std::vector<ScenarioSpec>& scenarios, const std::vector<ConstraintSet>& sets,
                                  const BatchOptions& options) {
  auto find_set = [&](int id) -> const ConstraintSet& {
    for (const auto& s : sets) {
      if (s.id == id) return s;
    }
    throw ValidationError("scenario references unknown constraint set " + std::to_string(id));
  };
  for (const auto& sc : scenarios) {
    if (sc.constraint_set != kAllSets) find_set(sc.constraint_set);
  }

  struct MeshEntry {
    std::string error;
    MeshGraph mesh;
    std::map<int, std::pair<TransitionTable, double>> tables;
  };
  std::map<std::string, MeshEntry> meshes;

  std::vector<MetricsRow> rows;
  for (size_t si = 0; si < scenarios.size(); ++si) {
    const ScenarioSpec& sc = scenarios[si];
    auto [it, fresh] = meshes.try_emplace(sc.mesh);
    MeshEntry& entry = it->second;
    if (fresh) {
      try {
        entry.mesh = load_mesh_spec(sc.mesh, options.base_dir);
      } catch (const Error& e) {
        entry.error = e.what();
      }
    }
    std::vector<const ConstraintSet*> chosen;
    if (sc.constraint_set == kAllSets) {
      for (const auto& s : sets) chosen.push_back(&s);
    } else {
      chosen.push_back(&find_set(sc.constraint_set));
    }

    for (const ConstraintSet* set : chosen) {
      const TransitionTable* table = nullptr;
      double table_time = 0.0;
      if (entry.error.empty()) {
        auto found = entry.tables.find(set->id);
        if (found == entry.tables.end()) {
          const auto t0 = std::chrono::steady_clock::now();
          TransitionTable tt = build_transition_table(entry.mesh, set->limits);
          const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
          found = entry.tables.emplace(set->id, std::make_pair(std::move(tt), dt)).first;
        }
        table = &found->second.first;
        table_time = found->second.second;
      }
      for (int run = 1; run <= sc.runs; ++run) {
        MetricsRow row;
        row.mesh = sc.mesh;
        row.scenario = static_cast<int>(si) + 1;
        row.constraint_set = set->id;
        row.run = run;
        row.timings.transitions = table_time;
        if (!entry.error.empty()) {
          row.status = "Error";
          row.message = entry.error;
        } else {
          try {
            const PlanResult r = plan(entry.mesh, sc.start, sc.goal, set->limits, options.plan, table);
            row.status = to_string(r.status);
            row.message = r.infeasible_reason;
            row.start_node = r.request.start;
            row.goal_node = r.request.goal;
            row.timings.build = r.timings.build;
            row.timings.solve = r.timings.solve;
            row.timings.extract = r.timings.extract;
            row.bb_nodes = r.solve.nodes;
            row.lp_iterations = r.solve.lp_iterations;
            row.bound = r.solve.bound;
            if (r.trajectory) {
              const Trajectory& t = *r.trajectory;
              row.path_nodes = static_cast<int>(t.nodes.size());
              row.pi = constraint_error(t, set->limits);
              row.delta = path_length_excess(t.waypoints);
              row.time_physical = t.total_time_physical;
              row.time_model = t.total_time_model;
              row.objective = r.solve.objective;
            } else if (row.ok()) {
              row.status = "Error";
              row.message = "no trajectory";
            }
          } catch (const Error& e) {
            row.status = "Error";
            row.message = e.what();
          }
        }
        rows.push_back(row);
        if (options.on_row) options.on_row(rows.back());
      }
    }
  }
  return rows;
}

namespace {

std::string csv_text(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n' || c == '"') c = ';';
  }
  return s;
}

void num(std::ostream& out, double v) {
  out << ',';
  if (std::isnan(v)) return;
  out << v;
}

}  // namespace

void write_results_csv(std::ostream& out, const std::vector<MetricsRow>& rows) {
  std::vector<double> pi, delta, tau;
  for (const auto& r : rows) {
    const bool ok = r.ok() && r.path_nodes > 0;
    pi.push_back(ok ? r.pi.total() : std::nan(""));
    delta.push_back(ok ? r.delta : std::nan(""));
    tau.push_back(ok ? r.tau() : std::nan(""));
  }
  const auto pin = min_max_normalize(pi);
  const auto dn = min_max_normalize(delta);
  const auto tn = min_max_normalize(tau);

  out << "mesh,scenario,constraint_set,run,status,start_node,goal_node,path_nodes,pi,pi_yaw,pi_acceleration,"
         "pi_velocity,delta,tau,tau_transitions,tau_build,tau_solve,tau_extract,time_physical,time_model,objective,"
         "bound,bb_nodes,lp_iterations,pi_norm,delta_norm,tau_norm,message\n";
  out << std::setprecision(10);
  for (size_t i = 0; i < rows.size(); ++i) {
    const MetricsRow& r = rows[i];
    out << csv_text(r.mesh) << ',' << r.scenario << ',' << r.constraint_set << ',' << r.run << ',' << r.status << ','
        << r.start_node << ',' << r.goal_node << ',' << r.path_nodes;
    num(out, pi[i]);
    num(out, r.path_nodes > 0 ? r.pi.yaw : std::nan(""));
    num(out, r.path_nodes > 0 ? r.pi.acceleration : std::nan(""));
    num(out, r.path_nodes > 0 ? r.pi.velocity : std::nan(""));
    num(out, delta[i]);
    num(out, tau[i]);
    num(out, r.timings.transitions);
    num(out, r.timings.build);
    num(out, r.timings.solve);
    num(out, r.timings.extract);
    num(out, r.time_physical);
    num(out, r.time_model);
    num(out, r.objective);
    num(out, r.bound);
    out << ',' << r.bb_nodes << ',' << r.lp_iterations;
    num(out, pin[i]);
    num(out, dn[i]);
    num(out, tn[i]);
    out << ',' << csv_text(r.message) << '\n';
  }
}

void write_summary_csv(std::ostream& out, const std::vector<MetricsRow>& rows) {
  struct Acc {
    int runs = 0, ok = 0;
    double sum[3] = {0, 0, 0};
    double lo[3] = {kInf, kInf, kInf};
    double hi[3] = {-kInf, -kInf, -kInf};
  };
  std::vector<std::tuple<std::string, int, int>> order;
  std::map<std::tuple<std::string, int, int>, Acc> acc;
  for (const auto& r : rows) {
    const auto key = std::make_tuple(r.mesh, r.scenario, r.constraint_set);
    if (!acc.count(key)) order.push_back(key);
    Acc& a = acc[key];
    ++a.runs;
    if (!r.ok() || r.path_nodes == 0) continue;
    ++a.ok;
    const double v[3] = {r.pi.total(), r.delta, r.tau()};
    for (int k = 0; k < 3; ++k) {
      a.sum[k] += v[k];
      a.lo[k] = std::min(a.lo[k], v[k]);
      a.hi[k] = std::max(a.hi[k], v[k]);
    }
  }
  out << "mesh,scenario,constraint_set,runs,succeeded,pi_mean,pi_min,pi_max,delta_mean,delta_min,delta_max,"
         "tau_mean,tau_min,tau_max\n"
      << std::setprecision(10);
  for (const auto& key : order) {
    const Acc& a = acc[key];
    out << csv_text(std::get<0>(key)) << ',' << std::get<1>(key) << ',' << std::get<2>(key) << ',' << a.runs << ','
        << a.ok;
    for (int k = 0; k < 3; ++k) {
      num(out, a.ok ? a.sum[k] / a.ok : std::nan(""));
      num(out, a.ok ? a.lo[k] : std::nan(""));
      num(out, a.ok ? a.hi[k] : std::nan(""));
    }
    out << '\n';
  }
}

}  // namespace kinomesh
