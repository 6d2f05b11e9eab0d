#include "kinomesh/planner.hpp"

#include <chrono>

#include "kinomesh/error.hpp"

namespace kinomesh {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Breadth-first search over directed edges, stepping only through allowed
// transitions. No walk from start to goal means no path either, and the
// relaxation alone is slow to prove that.
bool goal_reachable(const MeshGraph& mesh, const TransitionTable& table, const PlanRequest& request) {
  const std::vector<int> edges = admissible_edges(mesh, table, request);
  std::vector<char> usable(static_cast<size_t>(mesh.num_edges()), 0);
  for (int e : edges) usable[static_cast<size_t>(e)] = 1;
  std::vector<char> seen(usable.size(), 0);
  std::vector<int> queue;
  for (int e : mesh.out_edges(request.start)) {
    if (usable[static_cast<size_t>(e)]) {
      seen[static_cast<size_t>(e)] = 1;
      queue.push_back(e);
    }
  }
  for (size_t q = 0; q < queue.size(); ++q) {
    const int k = queue[q];
    const int v = mesh.edge(k).head;
    if (v == request.goal) return true;
    for (int l : mesh.out_edges(v)) {
      if (!usable[static_cast<size_t>(l)] || seen[static_cast<size_t>(l)] || table.is_forbidden(k, l)) continue;
      seen[static_cast<size_t>(l)] = 1;
      queue.push_back(l);
    }
  }
  return false;
}

PlanResult run(const MeshGraph& mesh, PlanResult r, const PlanOptions& options, const TransitionTable* table) {
  r.request.limits.validate();
  options.solve.validate();

  TransitionTable local;
  if (!table) {
    const auto t0 = Clock::now();
    local = build_transition_table(mesh, r.request.limits);
    r.timings.transitions = since(t0);
    table = &local;
  }

  auto t0 = Clock::now();
  MilpModel model;
  try {
    model = build_model(mesh, *table, r.request, options.model);
  } catch (const InfeasibleInput& e) {
    r.timings.build = since(t0);
    r.status = SolveStatus::Infeasible;
    r.infeasible_reason = e.what();
    return r;
  }
  r.timings.build = since(t0);
  if (!goal_reachable(mesh, *table, r.request)) {
    r.status = SolveStatus::Infeasible;
    r.infeasible_reason = "goal is not reachable through allowed transitions";
    return r;
  }
  r.model_rows = model.num_rows();
  r.model_cols = model.num_vars();

  t0 = Clock::now();
  const std::vector<double> hint = suggested_start(model);
  r.solve = solve_milp(model, options.solve, &hint);
  r.timings.solve = since(t0);
  r.status = r.solve.status;
  if (!r.solve.has_incumbent()) return r;

  t0 = Clock::now();
  r.trajectory = extract_path(mesh, model, r.solve.values, r.request, options.solve.integrality_tolerance);
  r.timings.extract = since(t0);
  return r;
}

}  // namespace

PlanResult plan(const MeshGraph& mesh, const Point3& start, const Point3& goal, const KinodynamicLimits& limits,
                const PlanOptions& options, const TransitionTable* table) {
  PlanResult r;
  r.start_snap = nearest_vertex(mesh, start);
  r.goal_snap = nearest_vertex(mesh, goal);
  r.request = {r.start_snap.node, r.goal_snap.node, limits};
  if (r.request.start == r.request.goal) {
    throw ValidationError("start and goal snap to the same vertex " + std::to_string(r.request.start));
  }
  return run(mesh, std::move(r), options, table);
}

PlanResult plan_nodes(const MeshGraph& mesh, int start, int goal, const KinodynamicLimits& limits,
                      const PlanOptions& options, const TransitionTable* table) {
  PlanResult r;
  r.request = {start, goal, limits};
  r.start_snap = {start, 0.0};
  r.goal_snap = {goal, 0.0};
  return run(mesh, std::move(r), options, table);
}

}  // namespace kinomesh
