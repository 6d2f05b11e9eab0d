#pragma once

#include <limits>
#include <string>
#include <vector>

#include "kinomesh/kinematics.hpp"
#include "kinomesh/mesh_io.hpp"

namespace kinomesh {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense { LessEqual, GreaterEqual, Equal };

/// Semantic role of a column. `entity` is a directed edge id for the edge
/// families and a vertex id for NodeVelocity.
enum class VarFamily { EdgeSelect, NodeVelocity, EdgeVelocity, Slowness, Product, AccelProduct, Other };

/// Semantic role of a row. `entity`/`other`/`index` are filled per family:
/// Flow (node), Curvature (edge k, edge l), Boundary (node, index 0 = start,
/// 1 = goal), envelope families (edge, index 1..4), Coupling/AccelGate (edge).
enum class RowFamily {
  Flow,
  Curvature,
  Coupling,
  Boundary,
  ProductEnvelope,
  SlownessEnvelope,
  AccelEnvelope,
  AccelGate,
  Other
};

struct Variable {
  std::string name;
  double lower = 0.0;
  double upper = kInf;
  double cost = 0.0;
  bool integer = false;
  VarFamily family = VarFamily::Other;
  int entity = -1;
};

struct Term {
  int var;
  double coef;
};

struct Constraint {
  std::string name;
  std::vector<Term> terms;
  Sense sense = Sense::LessEqual;
  double rhs = 0.0;
  RowFamily family = RowFamily::Other;
  int entity = -1;
  int other = -1;
  int index = 0;
};

/// Column ids per mesh entity; -1 where the entity has no column.
struct ModelLayout {
  std::vector<int> x, v_edge, s, h, lambda;  // per directed edge
  std::vector<int> v_node;                   // per vertex
  int start_node = -1;
  int goal_node = -1;
};

/// Linear program with binary columns, minimized. Row and column order is
/// part of the contract: builders and importers must be deterministic.
class MilpModel {
 public:
  int add_variable(Variable v);
  int add_row(Constraint c);

  const std::vector<Variable>& variables() const { return vars_; }
  const std::vector<Constraint>& rows() const { return rows_; }
  std::vector<Variable>& variables() { return vars_; }
  std::vector<Constraint>& rows() { return rows_; }
  int num_vars() const { return static_cast<int>(vars_.size()); }
  int num_rows() const { return static_cast<int>(rows_.size()); }

  const ModelLayout& layout() const { return layout_; }
  ModelLayout& layout() { return layout_; }

  /// Fills family/entity tags and the layout from the naming scheme used by
  /// build_model. Unknown names stay Other.
  void infer_layout_from_names(int num_vertices_hint = -1, int num_edges_hint = -1);

  double objective(const std::vector<double>& values) const;
  /// Largest violation of a row, relative to max(1, largest |coefficient|).
  double max_row_violation(const std::vector<double>& values) const;
  double row_activity(int row, const std::vector<double>& values) const;

  /// Same columns (name, bounds, cost, integrality) and rows (name, sense,
  /// rhs, terms compared after sorting by column).
  bool same_as(const MilpModel& other) const;

 private:
  std::vector<Variable> vars_;
  std::vector<Constraint> rows_;
  ModelLayout layout_;
};

struct PlanRequest {
  int start = -1;
  int goal = -1;
  KinodynamicLimits limits;
};

struct ModelOptions {
  /// Relax the acceleration cap with big-M on x_i (off-path edges free).
  bool gate_acceleration = false;
};

/// Directed edges that receive columns: pitch-admissible, excluding an
/// edge joining start and goal whose fixed average velocity (kappa+gamma)/2
/// is below 1/s_U (it could never satisfy the slowness envelope).
std::vector<int> admissible_edges(const MeshGraph& mesh, const TransitionTable& table,
                                  const PlanRequest& request);

/// Assembles the relaxed minimum-time program: flow, curvature, velocity
/// coupling, boundary velocities, the h = x*s envelope, the s*v = 1
/// envelope and the acceleration envelope over lambda = mu*rho.
MilpModel build_model(const MeshGraph& mesh, const TransitionTable& table, const PlanRequest& request,
                      const ModelOptions& options = {});

/// Starting point for the simplex: velocities at v_max, slowness at s_L,
/// selections and products at zero.
std::vector<double> suggested_start(const MilpModel& model);

const char* to_string(RowFamily f);

}  // namespace kinomesh
