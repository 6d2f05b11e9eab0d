#pragma once

#include <iosfwd>
#include <vector>

#include "kinomesh/kinematics.hpp"
#include "kinomesh/milp_model.hpp"

namespace kinomesh {

inline constexpr int kOracleNodeLimit = 14;
inline constexpr int kOracleGridSize = 201;

/// Simple start -> goal paths whose edges are pitch-admissible and whose
/// consecutive pairs are not forbidden. Depth-first over out-edges in
/// ascending id order. Refuses (DomainError) meshes above `max_nodes`.
std::vector<std::vector<int>> enumerate_paths(const MeshGraph& mesh, const TransitionTable& table,
                                              const PlanRequest& request, int max_nodes = kOracleNodeLimit);

/// Velocity grid v_j = v_min + j (v_max - v_min) / (K - 1).
std::vector<double> velocity_grid(const KinodynamicLimits& limits, int grid_size);
/// Grid index nearest to v (lower index on ties).
int snap_to_grid(const std::vector<double>& grid, double v);

struct ProfileResult {
  std::vector<double> node_velocities;  // empty when infeasible
  double time = kInf;
};

/// Minimum of sum 2 d_i / (v_a + v_b) over grid velocities with the end
/// velocities snapped to kappa and gamma and |v_b^2 - v_a^2| <= 2 d_i a_max.
/// Edges with v_a + v_b = 0 are untraversable.
ProfileResult optimal_profile_dp(const MeshGraph& mesh, const std::vector<int>& path,
                                 const KinodynamicLimits& limits, int grid_size = kOracleGridSize);

struct OracleResult {
  std::vector<int> best_path;
  double best_time = kInf;
  std::vector<std::vector<int>> paths;
  std::vector<double> path_times;  // parallel to paths
  int grid_size = 0;
};

/// Enumerates every admissible path and solves the grid DP on each.
/// Paths sharing a prefix share the DP work.
OracleResult run_oracle(const MeshGraph& mesh, const TransitionTable& table, const PlanRequest& request,
                        int grid_size = kOracleGridSize, int max_nodes = kOracleNodeLimit);

/// `rank,time,nodes` rows sorted by time; nodes separated by spaces.
void write_oracle_csv(std::ostream& out, const OracleResult& result);

}  // namespace kinomesh
