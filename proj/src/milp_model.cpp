#include "kinomesh/milp_model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string_view>

#include "kinomesh/error.hpp"

namespace kinomesh {

int MilpModel::add_variable(Variable v) {
  vars_.push_back(std::move(v));
  return num_vars() - 1;
}

int MilpModel::add_row(Constraint c) {
  c.terms.erase(std::remove_if(c.terms.begin(), c.terms.end(), [](const Term& t) { return t.coef == 0.0; }),
                c.terms.end());
  rows_.push_back(std::move(c));
  return num_rows() - 1;
}

double MilpModel::objective(const std::vector<double>& values) const {
  double total = 0.0;
  for (size_t j = 0; j < vars_.size(); ++j) total += vars_[j].cost * values[j];
  return total;
}

double MilpModel::row_activity(int row, const std::vector<double>& values) const {
  double a = 0.0;
  for (const Term& t : rows_[static_cast<size_t>(row)].terms) a += t.coef * values[static_cast<size_t>(t.var)];
  return a;
}

double MilpModel::max_row_violation(const std::vector<double>& values) const {
  double worst = 0.0;
  for (int i = 0; i < num_rows(); ++i) {
    const Constraint& c = rows_[static_cast<size_t>(i)];
    double scale = 1.0;
    for (const Term& t : c.terms) scale = std::max(scale, std::abs(t.coef));
    const double act = row_activity(i, values);
    double viol = 0.0;
    if (c.sense != Sense::GreaterEqual) viol = std::max(viol, act - c.rhs);
    if (c.sense != Sense::LessEqual) viol = std::max(viol, c.rhs - act);
    worst = std::max(worst, viol / scale);
  }
  return worst;
}

bool MilpModel::same_as(const MilpModel& other) const {
  if (vars_.size() != other.vars_.size() || rows_.size() != other.rows_.size()) return false;
  for (size_t j = 0; j < vars_.size(); ++j) {
    const Variable& a = vars_[j];
    const Variable& b = other.vars_[j];
    if (a.name != b.name || a.lower != b.lower || a.upper != b.upper || a.cost != b.cost ||
        a.integer != b.integer) {
      return false;
    }
  }
  auto sorted_terms = [](std::vector<Term> t) {
    std::sort(t.begin(), t.end(), [](const Term& x, const Term& y) { return x.var < y.var; });
    return t;
  };
  for (size_t i = 0; i < rows_.size(); ++i) {
    const Constraint& a = rows_[i];
    const Constraint& b = other.rows_[i];
    if (a.name != b.name || a.sense != b.sense || a.rhs != b.rhs) return false;
    auto ta = sorted_terms(a.terms);
    auto tb = sorted_terms(b.terms);
    if (ta.size() != tb.size()) return false;
    for (size_t k = 0; k < ta.size(); ++k) {
      if (ta[k].var != tb[k].var || ta[k].coef != tb[k].coef) return false;
    }
  }
  return true;
}

namespace {

// Parses "<prefix><int>" and returns the integer, or -1.
int suffix_int(std::string_view name, std::string_view prefix) {
  if (name.substr(0, prefix.size()) != prefix) return -1;
  std::string_view rest = name.substr(prefix.size());
  int value = -1;
  auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), value);
  if (ec != std::errc() || ptr != rest.data() + rest.size() || value < 0) return -1;
  return value;
}

struct NamedEnvelope {
  const char* prefix;
  RowFamily family;
};

constexpr NamedEnvelope kEnvelopes[] = {{"hmc", RowFamily::ProductEnvelope},
                                        {"svmc", RowFamily::SlownessEnvelope},
                                        {"accmc", RowFamily::AccelEnvelope}};

}  // namespace

void MilpModel::infer_layout_from_names(int num_vertices_hint, int num_edges_hint) {
  int max_edge = num_edges_hint - 1;
  int max_node = num_vertices_hint - 1;
  struct Prefix {
    const char* text;
    VarFamily family;
  };
  constexpr Prefix prefixes[] = {{"x_e", VarFamily::EdgeSelect},     {"v_n", VarFamily::NodeVelocity},
                                 {"v_e", VarFamily::EdgeVelocity},   {"s_e", VarFamily::Slowness},
                                 {"h_e", VarFamily::Product},        {"lam_e", VarFamily::AccelProduct}};
  for (Variable& v : vars_) {
    v.family = VarFamily::Other;
    v.entity = -1;
    for (const auto& p : prefixes) {
      int id = suffix_int(v.name, p.text);
      if (id >= 0) {
        v.family = p.family;
        v.entity = id;
        if (p.family == VarFamily::NodeVelocity) {
          max_node = std::max(max_node, id);
        } else {
          max_edge = std::max(max_edge, id | 1);
        }
        break;
      }
    }
  }

  layout_ = ModelLayout{};
  const auto ne = static_cast<size_t>(std::max(max_edge + 1, 0));
  layout_.x.assign(ne, -1);
  layout_.v_edge.assign(ne, -1);
  layout_.s.assign(ne, -1);
  layout_.h.assign(ne, -1);
  layout_.lambda.assign(ne, -1);
  layout_.v_node.assign(static_cast<size_t>(std::max(max_node + 1, 0)), -1);
  for (int j = 0; j < num_vars(); ++j) {
    const Variable& v = vars_[static_cast<size_t>(j)];
    const auto e = static_cast<size_t>(v.entity);
    switch (v.family) {
      case VarFamily::EdgeSelect: layout_.x[e] = j; break;
      case VarFamily::NodeVelocity: layout_.v_node[e] = j; break;
      case VarFamily::EdgeVelocity: layout_.v_edge[e] = j; break;
      case VarFamily::Slowness: layout_.s[e] = j; break;
      case VarFamily::Product: layout_.h[e] = j; break;
      case VarFamily::AccelProduct: layout_.lambda[e] = j; break;
      case VarFamily::Other: break;
    }
  }

  for (Constraint& c : rows_) {
    c.family = RowFamily::Other;
    c.entity = c.other = -1;
    c.index = 0;
    std::string_view name = c.name;
    if (int id = suffix_int(name, "flow_n"); id >= 0) {
      c.family = RowFamily::Flow;
      c.entity = id;
    } else if (int cid = suffix_int(name, "coup_e"); cid >= 0) {
      c.family = RowFamily::Coupling;
      c.entity = cid;
    } else if (int gid = suffix_int(name, "accgate_e"); gid >= 0) {
      c.family = RowFamily::AccelGate;
      c.entity = gid;
    } else if (int sid = suffix_int(name, "bnd_start_n"); sid >= 0) {
      c.family = RowFamily::Boundary;
      c.entity = sid;
      c.index = 0;
      layout_.start_node = sid;
    } else if (int tid = suffix_int(name, "bnd_goal_n"); tid >= 0) {
      c.family = RowFamily::Boundary;
      c.entity = tid;
      c.index = 1;
      layout_.goal_node = tid;
    } else if (name.substr(0, 6) == "curv_e") {
      auto sep = name.find("_e", 6);
      if (sep != std::string_view::npos) {
        int k = suffix_int(name.substr(0, sep), "curv_e");
        int l = suffix_int(name.substr(sep), "_e");
        if (k >= 0 && l >= 0) {
          c.family = RowFamily::Curvature;
          c.entity = k;
          c.other = l;
        }
      }
    } else {
      for (const auto& env : kEnvelopes) {
        std::string_view prefix = env.prefix;
        if (name.substr(0, prefix.size()) != prefix || name.size() < prefix.size() + 3) continue;
        char digit = name[prefix.size()];
        int e = suffix_int(name.substr(prefix.size() + 1), "_e");
        if (digit >= '1' && digit <= '4' && e >= 0) {
          c.family = env.family;
          c.entity = e;
          c.index = digit - '0';
        }
        break;
      }
    }
  }
}

std::vector<int> admissible_edges(const MeshGraph& mesh, const TransitionTable& table,
                                  const PlanRequest& request) {
  const KinodynamicLimits& lim = request.limits;
  const double boundary_avg = 0.5 * (lim.kappa + lim.gamma);
  const bool boundary_edge_usable = boundary_avg >= 1.0 / lim.s_upper_bound();
  std::vector<int> edges;
  for (int i = 0; i < mesh.num_edges(); ++i) {
    if (!table.pitch_ok(i)) continue;
    const auto& e = mesh.edge(i);
    const bool joins_ends = (e.tail == request.start && e.head == request.goal) ||
                            (e.tail == request.goal && e.head == request.start);
    if (joins_ends && !boundary_edge_usable) continue;
    edges.push_back(i);
  }
  return edges;
}

MilpModel build_model(const MeshGraph& mesh, const TransitionTable& table, const PlanRequest& request,
                      const ModelOptions& options) {
  const KinodynamicLimits& lim = request.limits;
  lim.validate();
  const int nv = mesh.num_vertices();
  const int ne = mesh.num_edges();
  if (request.start < 0 || request.start >= nv || request.goal < 0 || request.goal >= nv) {
    throw ValidationError("start/goal must be mesh vertices");
  }
  if (request.start == request.goal) throw ValidationError("start and goal must differ");
  if (lim.kappa < lim.v_min || lim.gamma < lim.v_min) {
    throw ValidationError("boundary velocities must lie in [v_min, v_max]");
  }
  if (static_cast<int>(table.edge_pitch().size()) != ne) {
    throw ValidationError("transition table does not match the mesh");
  }

  const std::vector<int> active = admissible_edges(mesh, table, request);
  std::vector<char> in_model(static_cast<size_t>(ne), 0);
  bool start_ok = false;
  bool goal_ok = false;
  for (int e : active) {
    in_model[static_cast<size_t>(e)] = 1;
    start_ok |= mesh.edge(e).tail == request.start;
    goal_ok |= mesh.edge(e).head == request.goal;
  }
  if (!start_ok) throw InfeasibleInput("start vertex has no admissible outgoing edge");
  if (!goal_ok) throw InfeasibleInput("goal vertex has no admissible incoming edge");

  const double s_lo = lim.s_lower_bound();
  const double s_hi = lim.s_upper_bound();
  const double v_lo = lim.v_min;
  const double v_hi = lim.v_max;
  const double span = v_hi - v_lo;  // mu in [-span, span], rho in [2 v_lo, 2 v_hi]

  MilpModel model;
  ModelLayout& L = model.layout();
  L.x.assign(static_cast<size_t>(ne), -1);
  L.v_edge.assign(static_cast<size_t>(ne), -1);
  L.s.assign(static_cast<size_t>(ne), -1);
  L.h.assign(static_cast<size_t>(ne), -1);
  L.lambda.assign(static_cast<size_t>(ne), -1);
  L.v_node.assign(static_cast<size_t>(nv), -1);
  L.start_node = request.start;
  L.goal_node = request.goal;

  auto edge_name = [](const char* prefix, int e) { return std::string(prefix) + std::to_string(e); };

  for (int e : active) {
    L.x[static_cast<size_t>(e)] =
        model.add_variable({edge_name("x_e", e), 0.0, 1.0, 0.0, true, VarFamily::EdgeSelect, e});
  }
  for (int n = 0; n < nv; ++n) {
    L.v_node[static_cast<size_t>(n)] =
        model.add_variable({edge_name("v_n", n), v_lo, v_hi, 0.0, false, VarFamily::NodeVelocity, n});
  }
  for (int e : active) {
    L.v_edge[static_cast<size_t>(e)] =
        model.add_variable({edge_name("v_e", e), 0.0, v_hi, 0.0, false, VarFamily::EdgeVelocity, e});
  }
  for (int e : active) {
    L.s[static_cast<size_t>(e)] =
        model.add_variable({edge_name("s_e", e), s_lo, s_hi, 0.0, false, VarFamily::Slowness, e});
  }
  for (int e : active) {
    L.h[static_cast<size_t>(e)] = model.add_variable(
        {edge_name("h_e", e), 0.0, kInf, mesh.length(e), false, VarFamily::Product, e});
  }
  for (int e : active) {
    const double cap = 2.0 * mesh.length(e) * lim.a_max;
    L.lambda[static_cast<size_t>(e)] = model.add_variable({edge_name("lam_e", e), -kInf,
                                                           options.gate_acceleration ? kInf : cap, 0.0,
                                                           false, VarFamily::AccelProduct, e});
  }

  // Flow conservation: out - in = +1 at the start, -1 at the goal, 0 elsewhere.
  for (int n = 0; n < nv; ++n) {
    Constraint c;
    c.name = edge_name("flow_n", n);
    c.family = RowFamily::Flow;
    c.entity = n;
    c.sense = Sense::Equal;
    c.rhs = n == request.start ? 1.0 : (n == request.goal ? -1.0 : 0.0);
    std::vector<int> incident;
    for (int e : mesh.out_edges(n)) incident.push_back(e);
    for (int e : mesh.in_edges(n)) incident.push_back(e);
    std::sort(incident.begin(), incident.end());
    for (int e : incident) {
      if (!in_model[static_cast<size_t>(e)]) continue;
      c.terms.push_back({L.x[static_cast<size_t>(e)], mesh.edge(e).tail == n ? 1.0 : -1.0});
    }
    model.add_row(std::move(c));
  }

  for (auto [k, l] : table.forbidden_pairs()) {
    if (!in_model[static_cast<size_t>(k)] || !in_model[static_cast<size_t>(l)]) continue;
    Constraint c;
    c.name = "curv_e" + std::to_string(k) + "_e" + std::to_string(l);
    c.family = RowFamily::Curvature;
    c.entity = k;
    c.other = l;
    c.sense = Sense::LessEqual;
    c.rhs = 1.0;
    c.terms = {{L.x[static_cast<size_t>(k)], 1.0}, {L.x[static_cast<size_t>(l)], 1.0}};
    model.add_row(std::move(c));
  }

  auto row = [&](std::string name, RowFamily family, int e, int index, std::vector<Term> terms, Sense sense,
                 double rhs) {
    Constraint c;
    c.name = std::move(name);
    c.family = family;
    c.entity = e;
    c.index = index;
    c.terms = std::move(terms);
    c.sense = sense;
    c.rhs = rhs;
    model.add_row(std::move(c));
  };

  for (int e : active) {
    const auto ue = static_cast<size_t>(e);
    const int va = L.v_node[static_cast<size_t>(mesh.edge(e).tail)];
    const int vb = L.v_node[static_cast<size_t>(mesh.edge(e).head)];
    row(edge_name("coup_e", e), RowFamily::Coupling, e, 0, {{L.v_edge[ue], 2.0}, {va, -1.0}, {vb, -1.0}},
        Sense::Equal, 0.0);
  }

  for (int e : active) {
    const auto ue = static_cast<size_t>(e);
    const int x = L.x[ue], s = L.s[ue], h = L.h[ue];
    const std::string id = "_e" + std::to_string(e);
    row("hmc1" + id, RowFamily::ProductEnvelope, e, 1, {{x, s_lo}, {h, -1.0}}, Sense::LessEqual, 0.0);
    row("hmc2" + id, RowFamily::ProductEnvelope, e, 2, {{h, 1.0}, {x, -s_hi}}, Sense::LessEqual, 0.0);
    row("hmc3" + id, RowFamily::ProductEnvelope, e, 3, {{s, 1.0}, {x, s_hi}, {h, -1.0}}, Sense::LessEqual,
        s_hi);
    row("hmc4" + id, RowFamily::ProductEnvelope, e, 4, {{h, 1.0}, {s, -1.0}, {x, -s_lo}}, Sense::LessEqual,
        -s_lo);
  }

  for (int e : active) {
    const auto ue = static_cast<size_t>(e);
    const int v = L.v_edge[ue], s = L.s[ue];
    const std::string id = "_e" + std::to_string(e);
    row("svmc1" + id, RowFamily::SlownessEnvelope, e, 1, {{v, s_lo}, {s, v_lo}}, Sense::LessEqual,
        1.0 + s_lo * v_lo);
    row("svmc2" + id, RowFamily::SlownessEnvelope, e, 2, {{v, s_hi}, {s, v_hi}}, Sense::LessEqual,
        1.0 + s_hi * v_hi);
    row("svmc3" + id, RowFamily::SlownessEnvelope, e, 3, {{v, s_hi}, {s, v_lo}}, Sense::GreaterEqual,
        1.0 + s_hi * v_lo);
    row("svmc4" + id, RowFamily::SlownessEnvelope, e, 4, {{v, s_lo}, {s, v_hi}}, Sense::GreaterEqual,
        1.0 + s_lo * v_hi);
  }

  for (int e : active) {
    const auto ue = static_cast<size_t>(e);
    const int lam = L.lambda[ue];
    const int va = L.v_node[static_cast<size_t>(mesh.edge(e).tail)];
    const int vb = L.v_node[static_cast<size_t>(mesh.edge(e).head)];
    const std::string id = "_e" + std::to_string(e);
    // mu = vb - va, rho = va + vb substituted into the four envelope rows.
    row("accmc1" + id, RowFamily::AccelEnvelope, e, 1,
        {{lam, 1.0}, {va, span + 2.0 * v_lo}, {vb, span - 2.0 * v_lo}}, Sense::GreaterEqual, 2.0 * span * v_lo);
    row("accmc2" + id, RowFamily::AccelEnvelope, e, 2,
        {{lam, 1.0}, {va, 2.0 * v_hi - span}, {vb, -(span + 2.0 * v_hi)}}, Sense::GreaterEqual,
        -2.0 * span * v_hi);
    row("accmc3" + id, RowFamily::AccelEnvelope, e, 3,
        {{lam, 1.0}, {va, 2.0 * v_lo - span}, {vb, -(span + 2.0 * v_lo)}}, Sense::LessEqual,
        -2.0 * span * v_lo);
    row("accmc4" + id, RowFamily::AccelEnvelope, e, 4,
        {{lam, 1.0}, {va, span + 2.0 * v_hi}, {vb, span - 2.0 * v_hi}}, Sense::LessEqual, 2.0 * span * v_hi);
    if (options.gate_acceleration) {
      const double cap = 2.0 * mesh.length(e) * lim.a_max;
      const double big_m = std::max(0.0, 2.0 * span * v_hi - cap);
      row(edge_name("accgate_e", e), RowFamily::AccelGate, e, 0, {{lam, 1.0}, {L.x[ue], big_m}},
          Sense::LessEqual, cap + big_m);
    }
  }

  row(edge_name("bnd_start_n", request.start), RowFamily::Boundary, request.start, 0,
      {{L.v_node[static_cast<size_t>(request.start)], 1.0}}, Sense::Equal, lim.kappa);
  row(edge_name("bnd_goal_n", request.goal), RowFamily::Boundary, request.goal, 1,
      {{L.v_node[static_cast<size_t>(request.goal)], 1.0}}, Sense::Equal, lim.gamma);
  return model;
}

std::vector<double> suggested_start(const MilpModel& model) {
  std::vector<double> hint(static_cast<size_t>(model.num_vars()), 0.0);
  for (int j = 0; j < model.num_vars(); ++j) {
    const Variable& v = model.variables()[static_cast<size_t>(j)];
    double value = 0.0;
    switch (v.family) {
      case VarFamily::NodeVelocity:
      case VarFamily::EdgeVelocity: value = v.upper; break;
      case VarFamily::Slowness: value = v.lower; break;
      default: value = std::clamp(0.0, v.lower, v.upper); break;
    }
    hint[static_cast<size_t>(j)] = value;
  }
  return hint;
}

const char* to_string(RowFamily f) {
  switch (f) {
    case RowFamily::Flow: return "flow";
    case RowFamily::Curvature: return "curvature";
    case RowFamily::Coupling: return "coupling";
    case RowFamily::Boundary: return "boundary";
    case RowFamily::ProductEnvelope: return "product-envelope";
    case RowFamily::SlownessEnvelope: return "slowness-envelope";
    case RowFamily::AccelEnvelope: return "accel-envelope";
    case RowFamily::AccelGate: return "accel-gate";
    case RowFamily::Other: return "other";
  }
  return "other";
}

}  // namespace kinomesh
