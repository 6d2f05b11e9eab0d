#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>
#include <set>

#include "kinomesh/error.hpp"
#include "kinomesh/kinematics.hpp"
#include "meshes.hpp"

using namespace kinomesh;

TEST_CASE("yaw cosine ignores height") {
  CHECK(yaw_cosine({1, 0, 0}, {0, 1, 0}) == doctest::Approx(0.0));
  CHECK(yaw_cosine({1, 0, 0.5}, {1, 0, -0.3}) == doctest::Approx(1.0));
  CHECK(yaw_cosine({1, 0, 0}, {-1, 0, 0}) == doctest::Approx(-1.0));
}

TEST_CASE("pitch angle") {
  CHECK(pitch_angle({1, 0, 1}) == doctest::Approx(M_PI / 4));
  CHECK(pitch_angle({1, 0, 0}) == 0.0);
  CHECK(pitch_angle({0, 0, 1}) == doctest::Approx(M_PI / 2));
  CHECK(pitch_angle({0, 1, -1}) == doctest::Approx(-M_PI / 4));
  CHECK_THROWS_AS(pitch_angle({0, 0, 0}), DomainError);
}

TEST_CASE("limits validation and slowness bounds") {
  KinodynamicLimits l;
  l.v_max = 0.5;
  CHECK_NOTHROW(l.validate());
  CHECK(l.s_lower_bound() == 2.0);
  CHECK(l.s_upper_bound() == l.s_upper);
  l.v_min = 0.1;
  CHECK(l.s_upper_bound() == doctest::Approx(10.0));

  auto broken = [](auto mutate) {
    KinodynamicLimits k;
    mutate(k);
    return k;
  };
  CHECK_THROWS_AS(broken([](auto& k) { k.a_max = 0.0; }).validate(), ValidationError);
  CHECK_THROWS_AS(broken([](auto& k) { k.v_min = 0.6; }).validate(), ValidationError);
  CHECK_THROWS_AS(broken([](auto& k) { k.kappa = 0.7; }).validate(), ValidationError);
  CHECK_THROWS_AS(broken([](auto& k) { k.gamma = -0.1; }).validate(), ValidationError);
  CHECK_THROWS_AS(broken([](auto& k) { k.theta_max_yaw = M_PI; }).validate(), ValidationError);
  CHECK_THROWS_AS(broken([](auto& k) { k.phi_max = 2.0; }).validate(), ValidationError);
  CHECK_THROWS_AS(broken([](auto& k) { k.theta_max_pitch = 0.0; }).validate(), ValidationError);
}

TEST_CASE("flat strip: straight ahead allowed, reversal forbidden") {
  const MeshGraph m = testing::chain_mesh(3, 1.0);
  const TransitionTable t = build_transition_table(m, KinodynamicLimits{});
  const int ab = m.find_edge(0, 1), bc = m.find_edge(1, 2), ba = m.find_edge(1, 0);
  CHECK_FALSE(t.is_forbidden(ab, bc));
  CHECK(t.is_forbidden(ab, ba));
  CHECK(t.pitch_ok(ab));
}

TEST_CASE("an edge steeper than phi_max is cut off entirely") {
  const double rise = std::tan(50.0 * M_PI / 180.0);
  std::vector<Point3> v = {{0, 0, 0}, {1, 0, 0}, {2, 0, rise}, {3, 0, rise}};
  const MeshGraph m = MeshGraph::from_edges(v, {{0, 1}, {1, 2}, {2, 3}});
  const TransitionTable t = build_transition_table(m, KinodynamicLimits{});
  const int steep = m.find_edge(1, 2);
  CHECK(t.edge_pitch()[static_cast<size_t>(steep)] == doctest::Approx(50.0 * M_PI / 180.0));
  CHECK_FALSE(t.pitch_ok(steep));
  CHECK_FALSE(t.pitch_ok(MeshGraph::twin(steep)));
  CHECK(t.is_forbidden(m.find_edge(0, 1), steep));
  CHECK(t.is_forbidden(steep, m.find_edge(2, 3)));
  CHECK(t.is_forbidden(m.find_edge(3, 2), MeshGraph::twin(steep)));
}

TEST_CASE("transition table matches a direct recomputation on random meshes") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const MeshGraph m = testing::random_grid_mesh(rng, 4, 4, 1.0, 0.9);
    KinodynamicLimits lim;
    lim.theta_max_yaw = std::uniform_real_distribution<double>(0.3, 2.5)(rng);
    lim.phi_max = std::uniform_real_distribution<double>(0.2, 0.8)(rng);
    lim.theta_max_pitch = std::uniform_real_distribution<double>(0.2, 1.0)(rng);
    const TransitionTable t = build_transition_table(m, lim);

    std::set<std::pair<int, int>> expected;
    auto heading = [&](int e) { return std::atan2(m.edge_vector(e).y(), m.edge_vector(e).x()); };
    auto slope = [&](int e) { return std::asin(m.edge_vector(e).z() / m.edge_vector(e).norm()); };
    for (int k = 0; k < m.num_edges(); ++k) {
      CHECK(t.edge_pitch()[static_cast<size_t>(k)] == doctest::Approx(slope(k)).epsilon(1e-12));
      CHECK(t.edge_pitch()[static_cast<size_t>(MeshGraph::twin(k))] == -t.edge_pitch()[static_cast<size_t>(k)]);
      for (int l = 0; l < m.num_edges(); ++l) {
        if (m.edge(k).head != m.edge(l).tail) continue;
        double turn = std::abs(heading(l) - heading(k));
        if (turn > M_PI) turn = 2 * M_PI - turn;
        const bool ok = turn <= lim.theta_max_yaw && std::abs(slope(k)) <= lim.phi_max &&
                        std::abs(slope(l)) <= lim.phi_max && std::abs(slope(l) - slope(k)) <= lim.theta_max_pitch;
        if (!ok) expected.insert({k, l});
        CHECK(transition_allowed(m, k, l, lim) == ok);
      }
    }
    const std::set<std::pair<int, int>> got(t.forbidden_pairs().begin(), t.forbidden_pairs().end());
    CHECK(got == expected);
  }
}

TEST_CASE("transition cache is keyed by mesh and geometric limits") {
  std::mt19937_64 rng(2);
  const MeshGraph m = testing::random_grid_mesh(rng, 3, 3, 1.0, 0.5);
  KinodynamicLimits lim;
  const TransitionTable t = build_transition_table(m, lim);
  const std::string path = (std::filesystem::temp_directory_path() / "kinomesh_cache_test.json").string();
  save_transition_cache(path, m, lim, t);

  TransitionTable back;
  CHECK(load_transition_cache(path, m, lim, back));
  CHECK(back == t);

  KinodynamicLimits faster = lim;
  faster.v_max = 0.9;  // not geometric, still a hit
  CHECK(load_transition_cache(path, m, faster, back));
  KinodynamicLimits sharper = lim;
  sharper.theta_max_yaw = 0.5;
  CHECK_FALSE(load_transition_cache(path, m, sharper, back));
  const MeshGraph other = testing::random_grid_mesh(rng, 3, 3, 1.0, 0.5);
  CHECK_FALSE(load_transition_cache(path, other, lim, back));
  CHECK_FALSE(load_transition_cache(path + ".missing", m, lim, back));
  std::filesystem::remove(path);
}
