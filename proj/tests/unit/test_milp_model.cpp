#include <doctest.h>

#include <cmath>
#include <random>
#include <map>
#include <set>

#include "kinomesh/error.hpp"
#include "kinomesh/milp_model.hpp"
#include "kinomesh/milp_solver.hpp"
#include "meshes.hpp"

using namespace kinomesh;

namespace {

PlanRequest two_node_request() {
  PlanRequest r;
  r.start = 0;
  r.goal = 1;
  r.limits.kappa = r.limits.gamma = 0.25;
  return r;
}

MeshGraph two_nodes() { return testing::chain_mesh(2, 1.0); }

// Interval for column `col` implied by the rows of one family and entity
// when every other column takes its value from `values`. Long double keeps
// the s_U-sized terms from cancelling away the digits being checked.
std::pair<double, double> implied(const MilpModel& m, RowFamily family, int entity, int col,
                                  const std::vector<double>& values) {
  double lo = -kInf, hi = kInf;
  for (const Constraint& c : m.rows()) {
    if (c.family != family || c.entity != entity) continue;
    long double a = 0.0L, rest = 0.0L;
    for (const Term& t : c.terms) {
      if (t.var == col) a += t.coef;
      else rest += static_cast<long double>(t.coef) * values[static_cast<size_t>(t.var)];
    }
    if (a == 0.0L) continue;
    const auto bound = static_cast<double>((c.rhs - rest) / a);
    const bool upper = (c.sense == Sense::LessEqual) == (a > 0.0);
    if (c.sense == Sense::Equal || upper) hi = std::min(hi, bound);
    if (c.sense == Sense::Equal || !upper) lo = std::max(lo, bound);
  }
  return {lo, hi};
}

}  // namespace

TEST_CASE("two-node model layout") {
  const MeshGraph mesh = two_nodes();
  const PlanRequest req = two_node_request();
  const TransitionTable table = build_transition_table(mesh, req.limits);
  const MilpModel m = build_model(mesh, table, req);

  int binaries = 0, node_v = 0, edge_v = 0, slow = 0, prod = 0, lam = 0;
  for (const Variable& v : m.variables()) {
    binaries += v.integer;
    node_v += v.family == VarFamily::NodeVelocity;
    edge_v += v.family == VarFamily::EdgeVelocity;
    slow += v.family == VarFamily::Slowness;
    prod += v.family == VarFamily::Product;
    lam += v.family == VarFamily::AccelProduct;
  }
  CHECK(binaries == 2);
  CHECK(node_v == 2);
  CHECK(edge_v == 2);
  CHECK(slow == 2);
  CHECK(prod == 2);
  CHECK(lam == 2);

  int flow = 0, curv = 0;
  for (const Constraint& c : m.rows()) {
    flow += c.family == RowFamily::Flow;
    curv += c.family == RowFamily::Curvature;
  }
  CHECK(flow == 2);
  CHECK(curv == 2);  // the twin pairs in both orders

  const SolveResult r = solve_milp(m);
  REQUIRE(r.status == SolveStatus::Optimal);
  CHECK(r.values[static_cast<size_t>(m.layout().x[0])] == 1.0);
  CHECK(r.values[static_cast<size_t>(m.layout().x[1])] == 0.0);
  // v_e = 0.25 on the only path. The slowness envelope lets s drop to
  // (1 + s_L v_max - s_L v) / v_max = 3 there, below 1/v = 4.
  CHECK(r.values[static_cast<size_t>(m.layout().v_edge[0])] == doctest::Approx(0.25));
  CHECK(r.objective == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("slowness bounds follow the velocity range") {
  const MeshGraph mesh = two_nodes();
  PlanRequest req = two_node_request();
  req.limits.v_max = 0.5;
  const MilpModel m = build_model(mesh, build_transition_table(mesh, req.limits), req);
  const Variable& s = m.variables()[static_cast<size_t>(m.layout().s[0])];
  CHECK(s.lower == 2.0);
  CHECK(s.upper == req.limits.s_upper);
  for (const Variable& v : m.variables()) {
    if (v.family == VarFamily::EdgeSelect) {
      CHECK(v.lower == 0.0);
      CHECK(v.upper == 1.0);
    }
    if (v.family == VarFamily::NodeVelocity) CHECK(v.upper == 0.5);
    if (v.family == VarFamily::Product) CHECK(v.lower == 0.0);
  }
}

TEST_CASE("start and goal joined only by a zero-speed edge") {
  const MeshGraph mesh = two_nodes();
  PlanRequest req;
  req.start = 0;
  req.goal = 1;
  CHECK(admissible_edges(mesh, build_transition_table(mesh, req.limits), req).empty());
  CHECK_THROWS_AS(build_model(mesh, build_transition_table(mesh, req.limits), req), InfeasibleInput);
  req.goal = 0;
  CHECK_THROWS_AS(build_model(mesh, build_transition_table(mesh, req.limits), req), ValidationError);
}

TEST_CASE("row counts match an independent tally on random meshes") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 15; ++trial) {
    const MeshGraph mesh = testing::random_grid_mesh(rng, 4, 3, 1.0, 0.6);
    PlanRequest req;
    req.start = 0;
    req.goal = mesh.num_vertices() - 1;
    req.limits.phi_max = 0.4;
    const TransitionTable table = build_transition_table(mesh, req.limits);
    for (bool gate : {false, true}) {
      MilpModel m;
      try {
        m = build_model(mesh, table, req, {gate});
      } catch (const InfeasibleInput&) {
        continue;
      }
      int active = 0;
      for (int e = 0; e < mesh.num_edges(); ++e) active += table.pitch_ok(e);
      int forbidden = 0;
      for (auto [k, l] : table.forbidden_pairs()) forbidden += table.pitch_ok(k) && table.pitch_ok(l);
      const int expected = mesh.num_vertices() + forbidden + active * (1 + 4 + 4 + 4 + (gate ? 1 : 0)) + 2;
      CHECK(m.num_rows() == expected);
      CHECK(m.num_vars() == mesh.num_vertices() + 5 * active);

      std::set<std::string> names;
      std::map<std::pair<RowFamily, int>, int> per_entity;
      for (const Constraint& c : m.rows()) {
        CHECK(names.insert(c.name).second);
        for (const Term& t : c.terms) {
          CHECK(t.var >= 0);
          CHECK(t.var < m.num_vars());
        }
        ++per_entity[{c.family, c.entity}];
      }
      for (const auto& [key, count] : per_entity) {
        switch (key.first) {
          case RowFamily::Flow:
          case RowFamily::Coupling: CHECK(count == 1); break;
          case RowFamily::ProductEnvelope:
          case RowFamily::SlownessEnvelope:
          case RowFamily::AccelEnvelope: CHECK(count == 4); break;
          default: break;
        }
      }
    }
  }
}

TEST_CASE("product envelope pins h to x*s at binary x") {
  const MeshGraph mesh = testing::chain_mesh(3, 1.0);
  PlanRequest req;
  req.start = 0;
  req.goal = 2;
  const MilpModel m = build_model(mesh, build_transition_table(mesh, req.limits), req);
  const ModelLayout& L = m.layout();
  const int e = mesh.find_edge(0, 1);
  std::vector<double> values(static_cast<size_t>(m.num_vars()), 0.0);
  std::mt19937_64 rng(8);
  const double s_lo = req.limits.s_lower_bound(), s_hi = req.limits.s_upper_bound();
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 2000; ++t) {
    const double x = t % 2;
    // Spread samples over the whole range, including the ends.
    const double s = t < 4 ? (t < 2 ? s_lo : s_hi) : s_lo + (s_hi - s_lo) * std::pow(u(rng), 6.0);
    values[static_cast<size_t>(L.x[static_cast<size_t>(e)])] = x;
    values[static_cast<size_t>(L.s[static_cast<size_t>(e)])] = s;
    const auto [lo, hi] = implied(m, RowFamily::ProductEnvelope, e, L.h[static_cast<size_t>(e)], values);
    CHECK(std::abs(lo - x * s) <= 1e-12 * std::max(1.0, s));
    CHECK(std::abs(hi - x * s) <= 1e-12 * std::max(1.0, s));
  }
}

TEST_CASE("envelopes admit the exact products") {
  const MeshGraph mesh = testing::chain_mesh(3, 0.7);
  PlanRequest req;
  req.start = 0;
  req.goal = 2;
  req.limits.v_min = 0.05;
  req.limits.kappa = req.limits.gamma = 0.05;
  const MilpModel m = build_model(mesh, build_transition_table(mesh, req.limits), req);
  const ModelLayout& L = m.layout();
  const int e = mesh.find_edge(1, 2);
  const auto ue = static_cast<size_t>(e);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> v(req.limits.v_min, req.limits.v_max);
  std::vector<double> values(static_cast<size_t>(m.num_vars()), 0.0);
  for (int t = 0; t < 5000; ++t) {
    const double va = v(rng), vb = v(rng), ve = v(rng);
    values[static_cast<size_t>(L.v_node[1])] = va;
    values[static_cast<size_t>(L.v_node[2])] = vb;
    values[static_cast<size_t>(L.v_edge[ue])] = ve;
    values[static_cast<size_t>(L.s[ue])] = 1.0 / ve;
    values[static_cast<size_t>(L.lambda[ue])] = vb * vb - va * va;
    for (const Constraint& c : m.rows()) {
      if (c.entity != e) continue;
      if (c.family != RowFamily::SlownessEnvelope && c.family != RowFamily::AccelEnvelope) continue;
      const double act = m.row_activity(static_cast<int>(&c - m.rows().data()), values);
      const double slack = c.sense == Sense::LessEqual ? c.rhs - act : act - c.rhs;
      CHECK(slack >= -1e-9);
    }
  }
}

TEST_CASE("a physically feasible chain trajectory satisfies every row") {
  const int n = 6;
  const MeshGraph mesh = testing::chain_mesh(n, 1.0);
  PlanRequest req;
  req.start = 0;
  req.goal = n - 1;
  const MilpModel m = build_model(mesh, build_transition_table(mesh, req.limits), req);
  const ModelLayout& L = m.layout();
  // Accelerate at a_max to v_max, cruise, brake; nodes 1 m apart.
  std::vector<double> vn(n);
  for (int i = 0; i < n; ++i) {
    const int from_end = std::min(i, n - 1 - i);
    vn[static_cast<size_t>(i)] = std::min(req.limits.v_max, std::sqrt(2.0 * req.limits.a_max * from_end));
  }
  vn.front() = req.limits.kappa;
  vn.back() = req.limits.gamma;
  std::vector<double> values(static_cast<size_t>(m.num_vars()), 0.0);
  double time = 0.0;
  for (int i = 0; i < n; ++i) values[static_cast<size_t>(L.v_node[static_cast<size_t>(i)])] = vn[static_cast<size_t>(i)];
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const auto ue = static_cast<size_t>(e);
    const double va = vn[static_cast<size_t>(mesh.edge(e).tail)];
    const double vb = vn[static_cast<size_t>(mesh.edge(e).head)];
    const double ve = 0.5 * (va + vb);
    const bool forward = mesh.edge(e).head > mesh.edge(e).tail;
    values[static_cast<size_t>(L.x[ue])] = forward;
    values[static_cast<size_t>(L.v_edge[ue])] = ve;
    values[static_cast<size_t>(L.s[ue])] = 1.0 / ve;
    values[static_cast<size_t>(L.h[ue])] = forward ? 1.0 / ve : 0.0;
    values[static_cast<size_t>(L.lambda[ue])] = vb * vb - va * va;
    if (forward) time += mesh.length(e) / ve;
  }
  CHECK(m.max_row_violation(values) <= 1e-9);
  CHECK(m.objective(values) == doctest::Approx(time).epsilon(1e-12));
  for (int j = 0; j < m.num_vars(); ++j) {
    const Variable& v = m.variables()[static_cast<size_t>(j)];
    CHECK(values[static_cast<size_t>(j)] >= v.lower - 1e-12);
    CHECK(values[static_cast<size_t>(j)] <= v.upper + 1e-12);
  }
  const SolveResult r = solve_milp(m);
  REQUIRE(r.status == SolveStatus::Optimal);
  CHECK(r.objective <= time + 1e-9);
}

TEST_CASE("layout is recovered from names") {
  std::mt19937_64 rng(4);
  const MeshGraph mesh = testing::random_grid_mesh(rng, 3, 3, 1.0, 0.2);
  PlanRequest req;
  req.start = 0;
  req.goal = 8;
  const MilpModel m = build_model(mesh, build_transition_table(mesh, req.limits), req, {true});
  MilpModel copy;
  for (Variable v : m.variables()) {
    v.family = VarFamily::Other;
    v.entity = -1;
    copy.add_variable(v);
  }
  for (Constraint c : m.rows()) {
    c.family = RowFamily::Other;
    c.entity = c.other = -1;
    c.index = 0;
    copy.add_row(c);
  }
  copy.infer_layout_from_names(mesh.num_vertices(), mesh.num_edges());
  CHECK(copy.layout().x == m.layout().x);
  CHECK(copy.layout().h == m.layout().h);
  CHECK(copy.layout().lambda == m.layout().lambda);
  CHECK(copy.layout().v_node == m.layout().v_node);
  CHECK(copy.layout().start_node == 0);
  CHECK(copy.layout().goal_node == 8);
  for (int i = 0; i < m.num_rows(); ++i) {
    const Constraint& a = m.rows()[static_cast<size_t>(i)];
    const Constraint& b = copy.rows()[static_cast<size_t>(i)];
    CHECK(a.family == b.family);
    CHECK(a.entity == b.entity);
    CHECK(a.other == b.other);
    CHECK(a.index == b.index);
  }
}
