#include "kinomesh/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

#include <json.hpp>

#include "kinomesh/error.hpp"

namespace kinomesh {

namespace {

void fill_edge_data(const MeshGraph& mesh, Trajectory& t) {
  const size_t m = t.edges.size();
  t.edge_lengths.resize(m);
  t.edge_times.resize(m);
  t.edge_accelerations.resize(m);
  t.total_time_physical = 0.0;
  for (size_t i = 0; i < m; ++i) {
    const double d = mesh.length(t.edges[i]);
    double v = t.edge_velocities[i];
    if (v < kVelocityFloor) {
      v = kVelocityFloor;
      ++t.diagnostics.floored_edges;
    }
    const double va = t.node_velocities[i];
    const double vb = t.node_velocities[i + 1];
    t.edge_lengths[i] = d;
    t.edge_times[i] = d / v;
    t.edge_accelerations[i] = (vb * vb - va * va) / (2.0 * d);
    t.total_time_physical += t.edge_times[i];
  }
}

}  // namespace

Trajectory extract_path(const MeshGraph& mesh, const MilpModel& model, const std::vector<double>& values,
                        const PlanRequest& request, double integrality_tolerance) {
  const ModelLayout& L = model.layout();
  if (static_cast<int>(values.size()) != model.num_vars()) {
    throw ExtractionError("assignment has " + std::to_string(values.size()) + " values for " +
                          std::to_string(model.num_vars()) + " columns");
  }
  std::vector<char> selected(static_cast<size_t>(mesh.num_edges()), 0);
  int remaining = 0;
  for (int e = 0; e < mesh.num_edges() && e < static_cast<int>(L.x.size()); ++e) {
    const int c = L.x[static_cast<size_t>(e)];
    if (c < 0) continue;
    const double x = values[static_cast<size_t>(c)];
    if (std::abs(x - std::round(x)) > integrality_tolerance) {
      throw ExtractionError("x_e" + std::to_string(e) + " = " + std::to_string(x) + " is not integral");
    }
    if (x > 0.5) {
      selected[static_cast<size_t>(e)] = 1;
      ++remaining;
    }
  }

  Trajectory t;
  std::vector<char> visited(static_cast<size_t>(mesh.num_vertices()), 0);
  int node = request.start;
  t.nodes.push_back(node);
  visited[static_cast<size_t>(node)] = 1;
  while (node != request.goal) {
    int next = -1;
    for (int e : mesh.out_edges(node)) {
      if (!selected[static_cast<size_t>(e)]) continue;
      if (next >= 0) throw ExtractionError("node " + std::to_string(node) + " has two selected outgoing edges");
      next = e;
    }
    if (next < 0) throw ExtractionError("selected path dead-ends at node " + std::to_string(node));
    selected[static_cast<size_t>(next)] = 0;
    --remaining;
    node = mesh.edge(next).head;
    if (visited[static_cast<size_t>(node)]) throw ExtractionError("selected path revisits node " + std::to_string(node));
    visited[static_cast<size_t>(node)] = 1;
    t.edges.push_back(next);
    t.nodes.push_back(node);
  }
  if (remaining > 0) {
    throw ExtractionError(std::to_string(remaining) + " selected edge(s) lie off the start-goal path (cycle)");
  }

  for (int n : t.nodes) {
    t.waypoints.push_back(mesh.vertices()[static_cast<size_t>(n)]);
    const int c = n < static_cast<int>(L.v_node.size()) ? L.v_node[static_cast<size_t>(n)] : -1;
    t.node_velocities.push_back(c >= 0 ? values[static_cast<size_t>(c)] : 0.0);
  }
  double model_time = 0.0;
  for (int e : t.edges) {
    const auto ue = static_cast<size_t>(e);
    const double v = values[static_cast<size_t>(L.v_edge[ue])];
    const double s = values[static_cast<size_t>(L.s[ue])];
    const double h = values[static_cast<size_t>(L.h[ue])];
    const double x = values[static_cast<size_t>(L.x[ue])];
    t.edge_velocities.push_back(v);
    model_time += mesh.length(e) * h;
    t.diagnostics.max_sv_gap = std::max(t.diagnostics.max_sv_gap, std::abs(s * v - 1.0));
    t.diagnostics.max_h_gap = std::max(t.diagnostics.max_h_gap, std::abs(h - x * s));
  }
  t.total_time_model = model_time;
  fill_edge_data(mesh, t);
  return t;
}

Trajectory make_trajectory(const MeshGraph& mesh, const std::vector<int>& nodes,
                           const std::vector<double>& node_velocities) {
  if (nodes.size() != node_velocities.size() || nodes.size() < 2) {
    throw ValidationError("a trajectory needs at least two nodes with one velocity each");
  }
  Trajectory t;
  t.nodes = nodes;
  t.node_velocities = node_velocities;
  for (size_t i = 0; i + 1 < nodes.size(); ++i) {
    const int e = mesh.find_edge(nodes[i], nodes[i + 1]);
    if (e < 0) {
      throw ValidationError("no edge " + std::to_string(nodes[i]) + " -> " + std::to_string(nodes[i + 1]));
    }
    t.edges.push_back(e);
    t.edge_velocities.push_back(0.5 * (node_velocities[i] + node_velocities[i + 1]));
  }
  for (int n : nodes) t.waypoints.push_back(mesh.vertices()[static_cast<size_t>(n)]);
  fill_edge_data(mesh, t);
  return t;
}

namespace {

double max_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
}

}  // namespace

double ValidationReport::max_acceleration() const { return max_of(acceleration); }
double ValidationReport::max_velocity() const { return std::max(max_of(edge_velocity), max_of(node_velocity)); }
double ValidationReport::max_yaw() const { return max_of(yaw); }
double ValidationReport::max_pitch() const { return std::max(max_of(pitch), max_of(pitch_change)); }

bool ValidationReport::clean(double tolerance) const {
  return max_acceleration() <= tolerance && max_velocity() <= tolerance && max_yaw() <= tolerance &&
         max_pitch() <= tolerance && forbidden_transitions == 0 && boundary_start <= tolerance &&
         boundary_goal <= tolerance;
}

ValidationReport validate(const Trajectory& t, const MeshGraph& mesh, const TransitionTable& table,
                          const KinodynamicLimits& limits) {
  ValidationReport r;
  for (size_t i = 0; i < t.edges.size(); ++i) {
    r.acceleration.push_back(std::max(0.0, std::abs(t.edge_accelerations[i]) - limits.a_max));
    r.edge_velocity.push_back(std::max(0.0, t.edge_velocities[i] - limits.v_max));
    const double phi = pitch_angle(mesh.edge_vector(t.edges[i]));
    r.pitch.push_back(std::max(0.0, std::abs(phi) - limits.phi_max));
  }
  for (double v : t.node_velocities) {
    r.node_velocity.push_back(std::max(0.0, v - limits.v_max) + std::max(0.0, -v));
  }
  for (size_t i = 0; i + 1 < t.edges.size(); ++i) {
    const int k = t.edges[i];
    const int l = t.edges[i + 1];
    const double angle = std::acos(yaw_cosine(mesh.edge_vector(k), mesh.edge_vector(l)));
    r.yaw.push_back(std::max(0.0, angle - limits.theta_max_yaw));
    const double dphi = pitch_angle(mesh.edge_vector(l)) - pitch_angle(mesh.edge_vector(k));
    r.pitch_change.push_back(std::max(0.0, std::abs(dphi) - limits.theta_max_pitch));
    if (table.is_forbidden(k, l)) ++r.forbidden_transitions;
  }
  if (!t.node_velocities.empty()) {
    r.boundary_start = std::abs(t.node_velocities.front() - limits.kappa);
    r.boundary_goal = std::abs(t.node_velocities.back() - limits.gamma);
  }
  return r;
}

Profiles profiles(const Trajectory& t) {
  Profiles p;
  double clock = 0.0;
  for (size_t i = 0; i < t.node_velocities.size(); ++i) {
    p.velocity_t.push_back(clock);
    p.velocity.push_back(t.node_velocities[i]);
    if (i < t.edge_times.size()) {
      p.acceleration_t.push_back(clock);
      p.acceleration.push_back(t.edge_accelerations[i]);
      clock += t.edge_times[i];
    }
  }
  return p;
}

void write_trajectory_json(std::ostream& out, const Trajectory& t) {
  nlohmann::json doc;
  doc["nodes"] = t.nodes;
  nlohmann::json wp = nlohmann::json::array();
  for (const Point3& p : t.waypoints) wp.push_back({p.x(), p.y(), p.z()});
  doc["waypoints"] = wp;
  doc["node_velocities"] = t.node_velocities;
  doc["edges"] = t.edges;
  doc["edge_lengths"] = t.edge_lengths;
  doc["edge_velocities"] = t.edge_velocities;
  doc["edge_times"] = t.edge_times;
  doc["edge_accelerations"] = t.edge_accelerations;
  doc["total_time_physical"] = t.total_time_physical;
  doc["total_time_model"] = t.total_time_model;
  doc["diagnostics"] = {{"max_sv_gap", t.diagnostics.max_sv_gap},
                        {"max_h_gap", t.diagnostics.max_h_gap},
                        {"floored_edges", t.diagnostics.floored_edges},
                        {"velocity_floor", kVelocityFloor}};
  out << doc.dump(2) << '\n';
}

void write_velocity_csv(std::ostream& out, const Profiles& p) {
  out << "t,v\n" << std::setprecision(9);
  for (size_t i = 0; i < p.velocity.size(); ++i) out << p.velocity_t[i] << ',' << p.velocity[i] << '\n';
}

void write_acceleration_csv(std::ostream& out, const Profiles& p) {
  out << "t,a\n" << std::setprecision(9);
  for (size_t i = 0; i < p.acceleration.size(); ++i) out << p.acceleration_t[i] << ',' << p.acceleration[i] << '\n';
}

}  // namespace kinomesh
