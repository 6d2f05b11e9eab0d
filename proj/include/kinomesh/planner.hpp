#pragma once

#include <optional>
#include <string>

#include "kinomesh/kinematics.hpp"
#include "kinomesh/milp_model.hpp"
#include "kinomesh/milp_solver.hpp"
#include "kinomesh/trajectory.hpp"

namespace kinomesh {

struct PlanOptions {
  ModelOptions model;
  SolveOptions solve;
};

/// Wall-clock seconds per pipeline stage.
struct PlanTimings {
  double transitions = 0.0;  // 0 when a precomputed table was passed in
  double build = 0.0;
  double solve = 0.0;
  double extract = 0.0;
  double total() const { return transitions + build + solve + extract; }
};

struct PlanResult {
  PlanRequest request;
  NearestVertex start_snap, goal_snap;
  SolveStatus status = SolveStatus::Infeasible;
  /// Set when the request was rejected before solving (isolated endpoint).
  std::string infeasible_reason;
  SolveResult solve;
  std::optional<Trajectory> trajectory;
  PlanTimings timings;
  int model_rows = 0;
  int model_cols = 0;

  bool feasible() const { return trajectory.has_value(); }
};

/// Snaps the query points to mesh vertices, builds and solves the model
/// and extracts the trajectory. `table` is built on the fly when null.
/// Throws ValidationError for bad limits or coincident endpoints.
PlanResult plan(const MeshGraph& mesh, const Point3& start, const Point3& goal, const KinodynamicLimits& limits,
                const PlanOptions& options = {}, const TransitionTable* table = nullptr);

/// Same, with endpoints given as vertex ids.
PlanResult plan_nodes(const MeshGraph& mesh, int start, int goal, const KinodynamicLimits& limits,
                      const PlanOptions& options = {}, const TransitionTable* table = nullptr);

}  // namespace kinomesh
