#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/Geometry>

#include "kinomesh/error.hpp"
#include "kinomesh/evaluation.hpp"
#include "meshes.hpp"

using namespace kinomesh;

namespace {

// Constraint error recomputed from the waypoints and node velocities alone.
double pi_directly(const std::vector<Point3>& w, const std::vector<double>& v, const KinodynamicLimits& lim) {
  long double sum = 0.0L;
  for (size_t i = 0; i + 2 < w.size(); ++i) {
    const Point3 a = w[i + 1] - w[i], b = w[i + 2] - w[i + 1];
    const double turn = std::atan2(std::abs(a.x() * b.y() - a.y() * b.x()), a.x() * b.x() + a.y() * b.y());
    sum += std::max(0.0, turn - lim.theta_max_yaw);
  }
  for (size_t i = 0; i + 1 < w.size(); ++i) {
    const double acc = (v[i + 1] * v[i + 1] - v[i] * v[i]) / (2.0 * (w[i + 1] - w[i]).norm());
    sum += std::max(0.0, std::abs(acc) - lim.a_max);
  }
  for (double x : v) sum += std::max(0.0, x - lim.v_max);
  return static_cast<double>(sum);
}

std::vector<std::pair<int, int>> chain_pairs(int n) {
  std::vector<std::pair<int, int>> es;
  for (int i = 1; i < n; ++i) es.push_back({i - 1, i});
  return es;
}

std::vector<int> iota_nodes(int n) {
  std::vector<int> nodes;
  for (int i = 0; i < n; ++i) nodes.push_back(i);
  return nodes;
}

}  // namespace

TEST_CASE("constraint error examples") {
  const KinodynamicLimits lim;
  const MeshGraph chain = testing::chain_mesh(4, 1.0);
  const Trajectory fine = make_trajectory(chain, {0, 1, 2, 3}, {0.0, 0.4, 0.4, 0.0});
  CHECK(constraint_error(fine, lim).total() == 0.0);

  const MeshGraph short_edge = MeshGraph::from_edges({{0, 0, 0}, {0.1, 0, 0}}, {{0, 1}});
  const Trajectory hard = make_trajectory(short_edge, {0, 1}, {0.0, std::sqrt(0.12)});
  const ConstraintError e = constraint_error(hard, lim);
  CHECK(e.acceleration == doctest::Approx(0.1));
  CHECK(e.yaw == 0.0);
  CHECK(e.velocity == 0.0);
}

TEST_CASE("constraint error matches a term-by-term recomputation") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> xy(-3.0, 3.0), z(-0.5, 0.5), vel(0.0, 1.2);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + trial % 7;
    std::vector<Point3> w;
    std::vector<double> v;
    for (int i = 0; i < n; ++i) {
      w.push_back(Point3(xy(rng), xy(rng), z(rng)));
      v.push_back(vel(rng));
    }
    const MeshGraph mesh = MeshGraph::from_edges(w, chain_pairs(n));
    KinodynamicLimits lim;
    lim.theta_max_yaw = trial % 2 ? M_PI / 3 : M_PI / 2;
    const Trajectory t = make_trajectory(mesh, iota_nodes(n), v);
    CHECK(constraint_error(t, lim).total() == doctest::Approx(pi_directly(w, v, lim)).epsilon(1e-9));
  }
}

TEST_CASE("path length excess") {
  CHECK(path_length_excess({Point3(0, 0, 0), Point3(1, 0, 0), Point3(3, 0, 0)}) == doctest::Approx(0.0));
  CHECK(path_length_excess({Point3(0, 0, 0), Point3(1, 0, 0), Point3(1, 1, 0)}) ==
        doctest::Approx(std::sqrt(2.0) - 1.0));
  CHECK_THROWS_AS(path_length_excess({Point3(1, 2, 3), Point3(0, 0, 0), Point3(1, 2, 3)}), DomainError);
  CHECK_THROWS_AS(path_length_excess({Point3(1, 2, 3)}), DomainError);

  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Point3> w;
    for (int i = 0; i < 2 + trial % 6; ++i) w.push_back(Point3(u(rng), u(rng), u(rng)));
    long double len = 0.0L;
    for (size_t i = 1; i < w.size(); ++i) len += (w[i] - w[i - 1]).norm();
    const double chord = (w.back() - w.front()).norm();
    const double d = path_length_excess(w);
    CHECK(d == doctest::Approx(static_cast<double>((len - chord) / chord)).epsilon(1e-12));
    CHECK(d >= 0.0);

    const Eigen::Matrix3d rot = Eigen::AngleAxisd(u(rng), Point3(u(rng), u(rng), u(rng)).normalized()).toRotationMatrix();
    const Point3 shift(u(rng), u(rng), u(rng));
    std::vector<Point3> moved;
    for (const Point3& p : w) moved.push_back(rot * p + shift);
    CHECK(path_length_excess(moved) == doctest::Approx(d).epsilon(1e-9));
  }
}

TEST_CASE("min-max normalisation") {
  const auto n = min_max_normalize({3.0, 1.0, 2.0, std::nan("")});
  CHECK(n[0] == 1.0);
  CHECK(n[1] == 0.0);
  CHECK(n[2] == 0.5);
  CHECK(std::isnan(n[3]));
  CHECK(min_max_normalize({7.0, 7.0}) == std::vector<double>{0.0, 0.0});
  CHECK(min_max_normalize({}).empty());

  std::mt19937_64 rng(8);
  std::normal_distribution<double> g(0.0, 10.0);
  std::vector<double> col(50);
  for (double& x : col) x = g(rng);
  const auto m = min_max_normalize(col);
  CHECK(*std::min_element(m.begin(), m.end()) == 0.0);
  CHECK(*std::max_element(m.begin(), m.end()) == 1.0);
  for (size_t i = 0; i < col.size(); ++i) {
    for (size_t j = 0; j < col.size(); ++j) {
      if (col[i] < col[j]) CHECK(m[i] <= m[j]);
    }
  }
}

TEST_CASE("synthetic meshes") {
  SynthParams p;
  p.nx = p.ny = 10;
  const MeshGraph plane = synth_mesh(p);
  CHECK(plane.faces().size() == 162);
  CHECK(plane.num_vertices() == 100);

  p.kind = SynthKind::Ridge;
  p.amplitude = 0.0;
  CHECK(synth_mesh(p).content_hash() == plane.content_hash());
  p.nx = p.ny = 11;
  p.kind = SynthKind::PlaneGrid;
  const MeshGraph plane11 = synth_mesh(p);
  p.kind = SynthKind::Ridge;
  CHECK(synth_mesh(p).content_hash() == plane11.content_hash());
  p.amplitude = 0.7;
  const MeshGraph ridge = synth_mesh(p);
  double top = 0.0;
  for (const Point3& v : ridge.vertices()) top = std::max(top, v.z());
  CHECK(top == doctest::Approx(0.7));

  const SynthParams q = parse_synth_spec("synth:pothole-field:nx=7;ny=9,depth=0.5,seed=3");
  CHECK(q.kind == SynthKind::PotholeField);
  CHECK(q.nx == 7);
  CHECK(q.ny == 9);
  CHECK(q.seed == 3);
  CHECK(synth_mesh(q).content_hash() == synth_mesh(q).content_hash());
  SynthParams other = q;
  other.seed = 4;
  CHECK(synth_mesh(other).content_hash() != synth_mesh(q).content_hash());
  CHECK_THROWS_AS(parse_synth_spec("synth:volcano"), ParseError);
  CHECK_THROWS_AS(parse_synth_spec("synth:ridge:height=2"), ParseError);
  CHECK_THROWS_AS(parse_synth_spec("ridge"), ParseError);
  CHECK(is_synth_spec("synth:ridge"));
  CHECK_FALSE(is_synth_spec("meshes/ridge.obj"));
}

TEST_CASE("the planner routes around a pothole too steep to cross") {
  SynthParams p;
  p.kind = SynthKind::PotholeField;
  p.nx = p.ny = 9;
  p.potholes = 1;
  p.depth = 2.5;
  p.sigma = 0.9;
  const MeshGraph mesh = synth_mesh(p);
  const KinodynamicLimits lim = standard_constraint_sets()[1].limits;
  const TransitionTable table = build_transition_table(mesh, lim);

  int bottom = 0;
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    if (mesh.vertices()[static_cast<size_t>(v)].z() < mesh.vertices()[static_cast<size_t>(bottom)].z()) bottom = v;
  }
  const int row = bottom / p.nx;
  int steep_on_row = 0;
  for (int i = 0; i + 1 < p.nx; ++i) {
    if (!table.pitch_ok(mesh.find_edge(row * p.nx + i, row * p.nx + i + 1))) ++steep_on_row;
  }
  REQUIRE(steep_on_row > 0);

  const PlanResult r = plan_nodes(mesh, row * p.nx, row * p.nx + p.nx - 1, lim);
  REQUIRE(r.feasible());
  for (int e : r.trajectory->edges) CHECK(table.pitch_ok(e));
  const auto& nodes = r.trajectory->nodes;
  CHECK(std::find(nodes.begin(), nodes.end(), bottom) == nodes.end());
  CHECK(std::any_of(nodes.begin(), nodes.end(), [&](int n) { return n / p.nx != row; }));
}

TEST_CASE("constraint set and scenario files") {
  std::istringstream sets_in(
      "id,theta_max_yaw,theta_max_pitch,phi_max,a_max,v_max,kappa,gamma\n"
      "4,pi/4,pi/4,pi/4,0.25,0.75,exp(-24),0.1\n");
  const auto sets = read_constraint_sets(sets_in);
  REQUIRE(sets.size() == 1);
  CHECK(sets[0].id == 4);
  CHECK(sets[0].limits.theta_max_yaw == doctest::Approx(M_PI / 4));
  CHECK(sets[0].limits.gamma == 0.1);

  std::ostringstream round;
  write_constraint_sets(round, standard_constraint_sets());
  std::istringstream back(round.str());
  const auto std_sets = read_constraint_sets(back);
  REQUIRE(std_sets.size() == 3);
  CHECK(std_sets[0].limits.v_max == 0.9);
  CHECK(std_sets[1].limits.theta_max_yaw == M_PI / 2);
  CHECK(std_sets[2].limits.a_max == 0.5);

  std::istringstream sc(
      "# comment\n"
      "goal_x,goal_y,goal_z,mesh,start_x,start_y,start_z,constraint_set,runs\n"
      "1,2,0,synth:ridge:nx=5;ny=5,0,0,0,*,3\n"
      "\n"
      "4,4,0,meshes/a.obj,1,1,0,2,1\n");
  const auto scenarios = read_scenarios(sc);
  REQUIRE(scenarios.size() == 2);
  CHECK(scenarios[0].mesh == "synth:ridge:nx=5;ny=5");
  CHECK(scenarios[0].goal == Point3(1, 2, 0));
  CHECK(scenarios[0].constraint_set == kAllSets);
  CHECK(scenarios[0].runs == 3);
  CHECK(scenarios[1].constraint_set == 2);

  std::istringstream missing("mesh,start_x,start_y,goal_x,goal_y,goal_z,constraint_set,runs\n");
  CHECK_THROWS_AS(read_scenarios(missing), ParseError);
  std::istringstream bad_runs(
      "mesh,start_x,start_y,start_z,goal_x,goal_y,goal_z,constraint_set,runs\n"
      "m.obj,0,0,0,1,1,0,1,0\n");
  try {
    read_scenarios(bad_runs);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("batch runs are deterministic and cover every combination") {
  ScenarioSpec s;
  s.mesh = "synth:pothole-field:nx=6;ny=6;potholes=2;depth=0.5;seed=2";
  s.start = Point3(0, 0, 0);
  s.goal = Point3(5, 4, 0);
  s.runs = 5;
  s.constraint_set = 3;
  const auto sets = standard_constraint_sets();
  const auto rows = run_batch({s}, sets);
  REQUIRE(rows.size() == 5);
  for (const MetricsRow& r : rows) {
    CHECK(r.ok());
    CHECK(r.path_nodes == rows[0].path_nodes);
    CHECK(r.pi.total() == rows[0].pi.total());
    CHECK(r.delta == rows[0].delta);
    CHECK(r.time_physical == rows[0].time_physical);
    CHECK(r.objective == rows[0].objective);
    CHECK(r.bb_nodes == rows[0].bb_nodes);
    CHECK(r.lp_iterations == rows[0].lp_iterations);
  }
  CHECK(rows[4].run == 5);

  s.runs = 1;
  s.constraint_set = kAllSets;
  ScenarioSpec broken = s;
  broken.mesh = "synth:ridge:nx=1";
  std::vector<int> seen;
  BatchOptions opts;
  opts.on_row = [&](const MetricsRow& r) { seen.push_back(r.constraint_set); };
  const auto all = run_batch({s, broken}, sets, opts);
  CHECK(seen == std::vector<int>{1, 2, 3, 1, 2, 3});
  CHECK(all[3].status == "Error");
  CHECK_FALSE(all[3].message.empty());
  CHECK(all[1].scenario == 1);
  CHECK(all[4].scenario == 2);

  std::ostringstream out;
  write_results_csv(out, all);
  const std::string text = out.str();
  CHECK(std::count(text.begin(), text.end(), '\n') == 7);
  CHECK(text.rfind("mesh,scenario,constraint_set,run,status,", 0) == 0);
  std::ostringstream summary;
  write_summary_csv(summary, all);
  const std::string summary_text = summary.str();
  CHECK(std::count(summary_text.begin(), summary_text.end(), '\n') == 7);

  ScenarioSpec unknown = s;
  unknown.constraint_set = 9;
  CHECK_THROWS_AS(run_batch({unknown}, sets), ValidationError);
}
