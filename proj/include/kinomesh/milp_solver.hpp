#pragma once

#include <cstdint>
#include <vector>

#include "kinomesh/milp_model.hpp"
#include "kinomesh/simplex.hpp"

namespace kinomesh {

enum class SolveStatus { Optimal, Infeasible, GapLimit, NodeLimit, TimeLimit };

const char* to_string(SolveStatus s);

struct SolveOptions {
  /// Relative gap (objective - bound) / max(1, |objective|) accepted at the end.
  double relative_gap = 1e-6;
  double integrality_tolerance = 1e-6;
  /// Fractionality above which the most fractional column is branched on.
  /// Points whose columns are all closer to integral are checked by rounding
  /// and, if the rounding loses bound, branched on the largest h-envelope gap.
  double significant_fraction = 1e-4;
  double feasibility_tolerance = 1e-9;
  /// 0 = unlimited.
  long node_limit = 0;
  /// Seconds; 0 = unlimited.
  double time_limit = 0.0;
  /// Kept for interface stability; the search does not draw random numbers.
  std::uint64_t seed = 0;

  void validate() const;
};

struct SolveResult {
  SolveStatus status = SolveStatus::Infeasible;
  std::vector<double> values;  // incumbent; empty when none was found
  double objective = kInf;
  double bound = -kInf;
  long nodes = 0;
  long lp_iterations = 0;
  double root_bound = -kInf;
  double wall_time = 0.0;

  bool has_incumbent() const { return !values.empty(); }
  double gap() const;
};

/// Best-first branch-and-bound with depth-first plunging. Branches on the
/// most fractional integer column (lowest index on ties); every node is
/// warm-started from its parent's basis. Incumbents are polished by fixing
/// the integer columns and re-solving the LP. Throws Error when the LP
/// solver breaks down numerically.
SolveResult solve_milp(const MilpModel& model, const SolveOptions& options = {},
                       const std::vector<double>* hint = nullptr);

}  // namespace kinomesh
