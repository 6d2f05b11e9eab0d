#include "fixture_models.hpp"

#include <random>

#include "kinomesh/kinematics.hpp"
#include "meshes.hpp"

namespace kinomesh::testing {

MilpModel two_node_model() {
  const MeshGraph mesh = chain_mesh(2, 1.0);
  PlanRequest req;
  req.start = 0;
  req.goal = 1;
  req.limits.kappa = req.limits.gamma = 0.25;
  return build_model(mesh, build_transition_table(mesh, req.limits), req);
}

MilpModel grid_model(std::uint64_t seed, bool gate) {
  std::mt19937_64 rng(seed);
  const MeshGraph mesh = random_grid_mesh(rng, 3, 3, 1.0, 0.3);
  PlanRequest req;
  req.start = 0;
  req.goal = 8;
  return build_model(mesh, build_transition_table(mesh, req.limits), req, {gate});
}

std::vector<std::pair<std::string, MilpModel>> golden_models() {
  return {{"two_node", two_node_model()}, {"grid_a", grid_model(1, false)}, {"grid_b_gated", grid_model(2, true)}};
}

}  // namespace kinomesh::testing
