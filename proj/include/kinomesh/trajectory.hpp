#pragma once

#include <iosfwd>
#include <vector>

#include "kinomesh/kinematics.hpp"
#include "kinomesh/milp_model.hpp"

namespace kinomesh {

/// Velocities below this are floored when computing edge times.
inline constexpr double kVelocityFloor = 1e-12;

struct TrajectoryDiagnostics {
  double max_sv_gap = 0.0;  // max |s_i v_i - 1| over selected edges
  double max_h_gap = 0.0;   // max |h_i - x_i s_i| over selected edges
  int floored_edges = 0;    // edges whose velocity hit kVelocityFloor
};

/// Selected path with its velocity profile.
struct Trajectory {
  std::vector<int> nodes;
  std::vector<int> edges;  // directed edge ids, edges[i] joins nodes[i] -> nodes[i+1]
  std::vector<Point3> waypoints;
  std::vector<double> node_velocities;
  std::vector<double> edge_lengths;
  std::vector<double> edge_velocities;
  std::vector<double> edge_times;
  std::vector<double> edge_accelerations;
  double total_time_physical = 0.0;  // sum d_i / v_i
  double total_time_model = 0.0;     // sum d_i h_i
  TrajectoryDiagnostics diagnostics;
};

/// Walks the x = 1 edges from the start node to the goal node. Throws
/// ExtractionError when x is not integral within `integrality_tolerance`,
/// when a node has two selected outgoing edges, when the walk dead-ends or
/// revisits a node, or when selected edges remain off the walk.
Trajectory extract_path(const MeshGraph& mesh, const MilpModel& model, const std::vector<double>& values,
                        const PlanRequest& request, double integrality_tolerance = 1e-6);

/// Builds a trajectory from an explicit node path and node velocities.
/// Edge velocities are the endpoint averages; model time is left at 0.
Trajectory make_trajectory(const MeshGraph& mesh, const std::vector<int>& nodes,
                           const std::vector<double>& node_velocities);

/// Per-family violation magnitudes; all zero means every constraint holds.
struct ValidationReport {
  std::vector<double> acceleration;   // per edge: max(0, |a_i| - a_max)
  std::vector<double> edge_velocity;  // per edge: max(0, v_i - v_max)
  std::vector<double> node_velocity;  // per node: max(0, v_n - v_max) + max(0, -v_n)
  std::vector<double> yaw;            // per consecutive pair: angle excess (rad)
  std::vector<double> pitch;          // per edge: max(0, |phi| - phi_max)
  std::vector<double> pitch_change;   // per consecutive pair: max(0, |dphi| - theta_pitch)
  int forbidden_transitions = 0;      // consecutive pairs listed in the table
  double boundary_start = 0.0;        // |v_start - kappa|
  double boundary_goal = 0.0;         // |v_goal - gamma|

  double max_acceleration() const;
  double max_velocity() const;
  double max_yaw() const;
  double max_pitch() const;
  bool clean(double tolerance) const;
};

ValidationReport validate(const Trajectory& trajectory, const MeshGraph& mesh, const TransitionTable& table,
                          const KinodynamicLimits& limits);

struct Profiles {
  std::vector<double> velocity_t, velocity;          // one sample per node
  std::vector<double> acceleration_t, acceleration;  // one sample per edge, held until the next
};

Profiles profiles(const Trajectory& trajectory);

void write_trajectory_json(std::ostream& out, const Trajectory& trajectory);
void write_velocity_csv(std::ostream& out, const Profiles& p);
void write_acceleration_csv(std::ostream& out, const Profiles& p);

}  // namespace kinomesh
