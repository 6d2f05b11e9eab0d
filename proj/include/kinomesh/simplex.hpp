#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "kinomesh/milp_model.hpp"

namespace kinomesh {

enum class LpStatus { Optimal, Infeasible, Unbounded, NumericalFailure, IterationLimit };

const char* to_string(LpStatus s);

struct LpOptions {
  double primal_tolerance = 1e-9;
  double dual_tolerance = 1e-9;
  /// 0 = derived from the problem size.
  long max_iterations = 0;
  int refactor_interval = 100;
  bool perturb_costs = true;
  /// Consecutive non-improving dual iterations before switching to Bland's rule.
  int stall_limit = 3000;
};

/// Basis snapshot for warm starts. One status per column followed by one per row.
struct BasisState {
  enum Status : std::int8_t { Basic = 0, AtLower = 1, AtUpper = 2, AtZero = 3 };
  std::vector<std::int8_t> status;
  bool empty() const { return status.empty(); }
};

struct LpResult {
  LpStatus status = LpStatus::NumericalFailure;
  double objective = 0.0;
  std::vector<double> values;        // per column, unscaled
  std::vector<double> row_activity;  // per row, unscaled
  long iterations = 0;
  BasisState basis;
};

/// Bounded-variable simplex over the LP relaxation of a MilpModel.
///
/// Works on the computational form  A x - r = 0,  l <= x <= u,  rl <= r <= ru
/// after power-of-two equilibration. The main loop is a dual simplex with
/// dual steepest-edge pricing and a bound-flipping Harris ratio test; a
/// primal simplex pass cleans up after cost perturbations are removed.
/// Column bounds can be tightened between solves, which is how
/// branch-and-bound reuses one instance.
class SimplexSolver {
 public:
  explicit SimplexSolver(const MilpModel& model, LpOptions options = {});
  ~SimplexSolver();
  SimplexSolver(const SimplexSolver&) = delete;
  SimplexSolver& operator=(const SimplexSolver&) = delete;

  int num_cols() const;
  int num_rows() const;

  /// Overrides a column's bounds (model units). Restored by reset_bounds().
  void set_col_bounds(int col, double lower, double upper);
  void reset_bounds();
  double col_lower(int col) const;
  double col_upper(int col) const;

  /// Solves from `warm` when given (and consistent), otherwise from the slack
  /// basis. `hint` picks the starting bound of zero-cost columns.
  LpResult solve(const BasisState* warm = nullptr, const std::vector<double>* hint = nullptr);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// One-shot LP relaxation solve (integrality dropped).
LpResult solve_lp(const MilpModel& model, const LpOptions& options = {},
                  const std::vector<double>* hint = nullptr);

}  // namespace kinomesh
