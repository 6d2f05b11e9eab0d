#include "kinomesh/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>

#include "kinomesh/error.hpp"

namespace kinomesh {

namespace {

void check_request(const MeshGraph& mesh, const PlanRequest& request, int max_nodes) {
  if (mesh.num_vertices() > max_nodes) {
    throw DomainError("oracle refuses meshes with more than " + std::to_string(max_nodes) + " nodes (got " +
                      std::to_string(mesh.num_vertices()) + ")");
  }
  if (request.start < 0 || request.start >= mesh.num_vertices() || request.goal < 0 ||
      request.goal >= mesh.num_vertices()) {
    throw ValidationError("start or goal node out of range");
  }
  if (request.start == request.goal) throw ValidationError("start and goal coincide");
}

// Calls visit(edge stack) for every admissible path, depth first.
template <typename Enter, typename Leave, typename Visit>
void walk_paths(const MeshGraph& mesh, const TransitionTable& table, const PlanRequest& request, Enter enter,
                Leave leave, Visit visit) {
  std::vector<char> on_path(static_cast<size_t>(mesh.num_vertices()), 0);
  std::vector<int> stack;
  auto rec = [&](auto&& self, int node) -> void {
    if (node == request.goal) {
      visit(stack);
      return;
    }
    for (int e : mesh.out_edges(node)) {
      if (!table.pitch_ok(e)) continue;
      const int head = mesh.edge(e).head;
      if (on_path[static_cast<size_t>(head)]) continue;
      if (!stack.empty() && table.is_forbidden(stack.back(), e)) continue;
      stack.push_back(e);
      on_path[static_cast<size_t>(head)] = 1;
      enter(e, static_cast<int>(stack.size()));
      self(self, head);
      leave();
      on_path[static_cast<size_t>(head)] = 0;
      stack.pop_back();
    }
  };
  on_path[static_cast<size_t>(request.start)] = 1;
  rec(rec, request.start);
}

std::vector<int> nodes_of(const MeshGraph& mesh, int start, const std::vector<int>& edges) {
  std::vector<int> nodes{start};
  for (int e : edges) nodes.push_back(mesh.edge(e).head);
  return nodes;
}

// One DP stage: best[j] over arrival velocity grid[j] after an edge of length d.
void relax_edge(const std::vector<double>& grid, const std::vector<double>& prev, double d, double a_max,
                std::vector<double>& next, std::vector<int>* arg) {
  const int k = static_cast<int>(grid.size());
  const double reach = 2.0 * d * a_max;
  next.assign(static_cast<size_t>(k), kInf);
  if (arg) arg->assign(static_cast<size_t>(k), -1);
  for (int a = 0; a < k; ++a) {
    const double base = prev[static_cast<size_t>(a)];
    if (!std::isfinite(base)) continue;
    const double va = grid[static_cast<size_t>(a)];
    // |vb^2 - va^2| <= reach bounds vb to an interval of the sorted grid.
    const double lo2 = va * va - reach;
    const double hi2 = va * va + reach;
    const double lo = lo2 > 0.0 ? std::sqrt(lo2) : -1.0;
    const double hi = std::sqrt(hi2);
    auto first = std::lower_bound(grid.begin(), grid.end(), lo - 1e-12);
    for (auto it = first; it != grid.end() && *it <= hi + 1e-12; ++it) {
      const double vb = *it;
      const double diff = vb * vb - va * va;
      if (std::abs(diff) > reach * (1.0 + 1e-12)) continue;
      if (va + vb <= 0.0) continue;
      const double t = base + 2.0 * d / (va + vb);
      const auto b = static_cast<size_t>(it - grid.begin());
      if (t < next[b]) {
        next[b] = t;
        if (arg) (*arg)[b] = a;
      }
    }
  }
}

}  // namespace

std::vector<std::vector<int>> enumerate_paths(const MeshGraph& mesh, const TransitionTable& table,
                                              const PlanRequest& request, int max_nodes) {
  check_request(mesh, request, max_nodes);
  std::vector<std::vector<int>> out;
  walk_paths(
      mesh, table, request, [](int, int) {}, [] {},
      [&](const std::vector<int>& edges) { out.push_back(nodes_of(mesh, request.start, edges)); });
  return out;
}

std::vector<double> velocity_grid(const KinodynamicLimits& limits, int grid_size) {
  if (grid_size < 2) throw DomainError("velocity grid needs at least 2 points");
  std::vector<double> grid(static_cast<size_t>(grid_size));
  const double step = (limits.v_max - limits.v_min) / (grid_size - 1);
  for (int j = 0; j < grid_size; ++j) grid[static_cast<size_t>(j)] = limits.v_min + j * step;
  grid.back() = limits.v_max;
  return grid;
}

int snap_to_grid(const std::vector<double>& grid, double v) {
  int best = 0;
  for (int j = 1; j < static_cast<int>(grid.size()); ++j) {
    if (std::abs(grid[static_cast<size_t>(j)] - v) < std::abs(grid[static_cast<size_t>(best)] - v)) best = j;
  }
  return best;
}

ProfileResult optimal_profile_dp(const MeshGraph& mesh, const std::vector<int>& path,
                                 const KinodynamicLimits& limits, int grid_size) {
  if (path.size() < 2) throw DomainError("a path needs at least two nodes");
  const std::vector<double> grid = velocity_grid(limits, grid_size);
  const int k0 = snap_to_grid(grid, limits.kappa);
  const int kf = snap_to_grid(grid, limits.gamma);

  std::vector<double> cost(grid.size(), kInf);
  cost[static_cast<size_t>(k0)] = 0.0;
  std::vector<std::vector<int>> args;
  std::vector<double> next;
  for (size_t i = 0; i + 1 < path.size(); ++i) {
    const int e = mesh.find_edge(path[i], path[i + 1]);
    if (e < 0) throw ValidationError("no edge " + std::to_string(path[i]) + " -> " + std::to_string(path[i + 1]));
    args.emplace_back();
    relax_edge(grid, cost, mesh.length(e), limits.a_max, next, &args.back());
    cost.swap(next);
  }

  ProfileResult r;
  r.time = cost[static_cast<size_t>(kf)];
  if (!std::isfinite(r.time)) return r;
  r.node_velocities.assign(path.size(), 0.0);
  int j = kf;
  for (size_t i = path.size() - 1; i > 0; --i) {
    r.node_velocities[i] = grid[static_cast<size_t>(j)];
    j = args[i - 1][static_cast<size_t>(j)];
  }
  r.node_velocities[0] = grid[static_cast<size_t>(j)];
  return r;
}

OracleResult run_oracle(const MeshGraph& mesh, const TransitionTable& table, const PlanRequest& request,
                        int grid_size, int max_nodes) {
  check_request(mesh, request, max_nodes);
  const std::vector<double> grid = velocity_grid(request.limits, grid_size);
  const int k0 = snap_to_grid(grid, request.limits.kappa);
  const int kf = snap_to_grid(grid, request.limits.gamma);

  // layers[depth] holds the DP vector after `depth` edges of the current prefix.
  std::vector<std::vector<double>> layers(1, std::vector<double>(grid.size(), kInf));
  layers[0][static_cast<size_t>(k0)] = 0.0;

  OracleResult result;
  result.grid_size = grid_size;
  walk_paths(
      mesh, table, request,
      [&](int e, int depth) {
        if (static_cast<int>(layers.size()) <= depth) layers.emplace_back();
        relax_edge(grid, layers[static_cast<size_t>(depth - 1)], mesh.length(e), request.limits.a_max,
                   layers[static_cast<size_t>(depth)], nullptr);
      },
      [] {},
      [&](const std::vector<int>& edges) {
        const double t = layers[edges.size()][static_cast<size_t>(kf)];
        result.paths.push_back(nodes_of(mesh, request.start, edges));
        result.path_times.push_back(t);
        if (t < result.best_time) {
          result.best_time = t;
          result.best_path = result.paths.back();
        }
      });
  return result;
}

void write_oracle_csv(std::ostream& out, const OracleResult& result) {
  std::vector<size_t> order(result.paths.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return result.path_times[a] < result.path_times[b]; });
  out << "rank,time,nodes\n" << std::setprecision(12);
  int rank = 1;
  for (size_t i : order) {
    out << rank++ << ',' << result.path_times[i] << ',';
    for (size_t j = 0; j < result.paths[i].size(); ++j) out << (j ? " " : "") << result.paths[i][j];
    out << '\n';
  }
}

}  // namespace kinomesh
