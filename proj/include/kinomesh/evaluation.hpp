#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "kinomesh/kinematics.hpp"
#include "kinomesh/planner.hpp"
#include "kinomesh/trajectory.hpp"

namespace kinomesh {

/// Constraint error split by term. The total mixes radians, m/s^2 and m/s.
struct ConstraintError {
  double yaw = 0.0;
  double acceleration = 0.0;
  double velocity = 0.0;
  double total() const { return yaw + acceleration + velocity; }
};

/// Sums the yaw excess over consecutive edge pairs, the acceleration excess
/// over edges and the velocity excess over node velocities.
ConstraintError constraint_error(const Trajectory& trajectory, const KinodynamicLimits& limits);

/// (polyline length - chord) / chord. DomainError when the ends coincide.
double path_length_excess(const std::vector<Point3>& waypoints);

/// Maps the finite values onto [0, 1]; a constant column maps to 0. NaN
/// entries stay NaN.
std::vector<double> min_max_normalize(const std::vector<double>& column);

enum class SynthKind { PlaneGrid, Ridge, PotholeField };

/// Regular nx-by-ny grid with vertex j*nx + i at (i*spacing, j*spacing, z).
/// Cell (i, j) is split along the diagonal through vertex (i, j) when i + j is
/// even and along the other one otherwise, so even vertices see all eight
/// compass directions and a pi/3 yaw limit can still turn through 360
/// degrees in 45-degree steps. 2(nx-1)(ny-1) faces.
struct SynthParams {
  SynthKind kind = SynthKind::PlaneGrid;
  int nx = 11;
  int ny = 11;
  double spacing = 1.0;
  // ridge: a cos^2 bump of the given width running along y; NaN centre
  // means the middle of the x extent.
  double amplitude = 1.0;
  double width = 3.0;
  double center = std::nan("");
  // pothole-field: Gaussian depressions at seeded positions.
  int potholes = 4;
  double depth = 1.0;
  double sigma = 1.0;
  std::uint64_t seed = 1;
};

MeshGraph synth_mesh(const SynthParams& params);

/// Parses "synth:<kind>[:key=value,...]", e.g. "synth:ridge:nx=11,ny=11,amplitude=0.5".
/// ';' also separates parameters, for specs embedded in CSV cells.
SynthParams parse_synth_spec(const std::string& spec);
bool is_synth_spec(const std::string& text);

/// Loads a mesh file, or builds a synthetic one for "synth:" specs.
/// Relative file paths are resolved against `base_dir` when given.
MeshGraph load_mesh_spec(const std::string& spec, const std::string& base_dir = "");

struct ConstraintSet {
  int id = 0;
  KinodynamicLimits limits;
};

/// The three evaluation sets (yaw limit, a_max, v_max):
/// 1 = (pi/3, 0.5, 0.9), 2 = (pi/2, 0.9, 0.5), 3 = (pi/3, 0.5, 0.5).
std::vector<ConstraintSet> standard_constraint_sets();

/// CSV with header id,theta_max_yaw,theta_max_pitch,phi_max,a_max,v_max,kappa,gamma.
/// Cells accept parse_value expressions.
std::vector<ConstraintSet> read_constraint_sets(std::istream& in);
void write_constraint_sets(std::ostream& out, const std::vector<ConstraintSet>& sets);

inline constexpr int kAllSets = -1;

struct ScenarioSpec {
  std::string mesh;
  Point3 start = Point3::Zero();
  Point3 goal = Point3::Zero();
  int constraint_set = kAllSets;  // "*" in the file
  int runs = 1;
};

/// CSV with header mesh,start_x,start_y,start_z,goal_x,goal_y,goal_z,constraint_set,runs.
std::vector<ScenarioSpec> read_scenarios(std::istream& in);
void write_scenarios(std::ostream& out, const std::vector<ScenarioSpec>& scenarios);

/// One planner run. Failed runs carry status "Error" and the message.
struct MetricsRow {
  std::string mesh;
  int scenario = 0;  // 1-based line in the scenario file
  int constraint_set = 0;
  int run = 0;       // 1-based
  std::string status;
  std::string message;
  int start_node = -1;
  int goal_node = -1;
  int path_nodes = 0;
  ConstraintError pi;
  double delta = std::nan("");
  double time_physical = std::nan("");
  double time_model = std::nan("");
  double objective = std::nan("");
  double bound = std::nan("");
  long bb_nodes = 0;
  long lp_iterations = 0;
  PlanTimings timings;  // transitions is the per-(mesh, set) table build time
  double tau() const { return timings.build + timings.solve + timings.extract; }
  bool ok() const { return status == "Optimal" || status == "GapLimit"; }
};

struct BatchOptions {
  PlanOptions plan;
  std::string base_dir;
  /// Called after each row, in order.
  std::function<void(const MetricsRow&)> on_row;
};

/// Runs every (scenario, set, run) combination in file order. Errors are
/// recorded in the row and do not stop the batch. ValidationError when a
/// scenario names an unknown set.
std::vector<MetricsRow> run_batch(const std::vector<ScenarioSpec>& scenarios, const std::vector<ConstraintSet>& sets,
                                  const BatchOptions& options = {});

/// One row per run plus pi_norm, delta_norm and tau_norm over successful rows.
void write_results_csv(std::ostream& out, const std::vector<MetricsRow>& rows);

/// Mean, min and max of pi, delta and tau per (mesh, scenario, set).
void write_summary_csv(std::ostream& out, const std::vector<MetricsRow>& rows);

}  // namespace kinomesh
