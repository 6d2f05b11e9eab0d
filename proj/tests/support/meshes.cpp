#include "meshes.hpp"

namespace kinomesh::testing {

MeshGraph chain_mesh(int nodes, double spacing) {
  std::vector<Point3> v;
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < nodes; ++i) {
    v.emplace_back(i * spacing, 0.0, 0.0);
    if (i > 0) e.emplace_back(i - 1, i);
  }
  return MeshGraph::from_edges(std::move(v), e);
}

MeshGraph random_grid_mesh(std::mt19937_64& rng, int nx, int ny, double spacing, double max_dz) {
  std::uniform_real_distribution<double> jitter(-0.2 * spacing, 0.2 * spacing);
  std::uniform_real_distribution<double> dz(-max_dz, max_dz);
  std::bernoulli_distribution flip(0.5);
  std::vector<Point3> v;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) v.emplace_back(i * spacing + jitter(rng), j * spacing + jitter(rng), dz(rng));
  }
  std::vector<Face> f;
  for (int j = 0; j + 1 < ny; ++j) {
    for (int i = 0; i + 1 < nx; ++i) {
      const int a = j * nx + i, b = a + 1, c = a + nx, d = c + 1;
      if (flip(rng)) {
        f.push_back({a, b, d});
        f.push_back({a, d, c});
      } else {
        f.push_back({a, b, c});
        f.push_back({b, d, c});
      }
    }
  }
  return MeshGraph::from_faces(std::move(v), std::move(f));
}

}  // namespace kinomesh::testing
