#include "kinomesh/milp_solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <optional>
#include <queue>

#include "kinomesh/error.hpp"

namespace kinomesh {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::Infeasible: return "Infeasible";
    case SolveStatus::GapLimit: return "GapLimit";
    case SolveStatus::NodeLimit: return "NodeLimit";
    case SolveStatus::TimeLimit: return "TimeLimit";
  }
  return "?";
}

void SolveOptions::validate() const {
  if (!(relative_gap > 0.0) || !(integrality_tolerance > 0.0) || !(feasibility_tolerance > 0.0)) {
    throw ValidationError("solver tolerances must be > 0");
  }
  if (!(significant_fraction > 0.0 && significant_fraction <= 0.5)) {
    throw ValidationError("significant_fraction must lie in (0, 0.5]");
  }
  if (node_limit < 0 || time_limit < 0.0) throw ValidationError("solver limits must be >= 0");
}

double SolveResult::gap() const {
  if (!has_incumbent()) return kInf;
  return std::max(0.0, objective - bound) / std::max(1.0, std::abs(objective));
}

namespace {

constexpr double kProvenGap = 1e-6;

struct Node {
  long id = 0;
  double bound = -kInf;
  std::vector<std::pair<int, std::int8_t>> fixes;  // integer column -> 0/1
  std::shared_ptr<const BasisState> basis;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.id > b.id;
  }
};

class BranchAndBound {
 public:
  BranchAndBound(const MilpModel& model, const SolveOptions& opt, const std::vector<double>* hint)
      : model_(model), opt_(opt), hint_(hint), lp_(model, lp_options(opt)) {
    for (int j = 0; j < model.num_vars(); ++j) {
      if (model.variables()[static_cast<size_t>(j)].integer) integers_.push_back(j);
    }
  }

  SolveResult run() {
    start_ = std::chrono::steady_clock::now();
    Node root;
    root.id = next_id_++;
    std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
    std::optional<Node> dive = std::move(root);
    bool limit_hit = false;
    SolveStatus limit_status = SolveStatus::NodeLimit;

    while (dive || !open.empty()) {
      if (!dive) {
        Node top = open.top();
        open.pop();
        if (prunable(top.bound)) continue;
        dive = std::move(top);
      }
      if (opt_.node_limit > 0 && result_.nodes >= opt_.node_limit) {
        limit_hit = true;
        limit_status = SolveStatus::NodeLimit;
        open.push(std::move(*dive));
        dive.reset();
        break;
      }
      if (opt_.time_limit > 0.0 && elapsed() >= opt_.time_limit) {
        limit_hit = true;
        limit_status = SolveStatus::TimeLimit;
        open.push(std::move(*dive));
        dive.reset();
        break;
      }

      Node node = std::move(*dive);
      dive.reset();
      ++result_.nodes;
      const LpResult lp = solve_node(node);
      if (result_.nodes == 1) {
        if (lp.status == LpStatus::Optimal) result_.root_bound = lp.objective;
      }
      if (lp.status == LpStatus::Infeasible) continue;
      if (lp.status != LpStatus::Optimal) {
        throw Error(std::string("LP relaxation failed: ") + to_string(lp.status));
      }
      if (prunable(lp.objective)) continue;

      int branch = most_fractional(lp.values, std::max(opt_.integrality_tolerance, opt_.significant_fraction));
      if (branch < 0) {
        // Near-integral point. Slack of order 1/s_U in the h-envelope lets
        // x = 1 - eps undercut the true edge time, so accept the node only if
        // the rounded assignment reproduces its bound.
        const double exact = polish(lp);
        if (exact <= lp.objective + opt_.relative_gap * std::max(1.0, std::abs(exact))) continue;
        branch = largest_envelope_gap(lp.values);
        if (branch < 0) branch = most_fractional(lp.values, 0.0);
        if (branch < 0) continue;
      }

      auto basis = std::make_shared<const BasisState>(lp.basis);
      const double value = lp.values[static_cast<size_t>(branch)];
      const std::int8_t first = value >= 0.5 ? 1 : 0;
      for (std::int8_t side : {first, static_cast<std::int8_t>(1 - first)}) {
        Node child;
        child.id = next_id_++;
        child.bound = lp.objective;
        child.fixes = node.fixes;
        child.fixes.emplace_back(branch, side);
        child.basis = basis;
        if (!dive) {
          dive = std::move(child);
        } else {
          open.push(std::move(child));
        }
      }
    }

    double bound = result_.objective;
    if (limit_hit) {
      while (!open.empty()) {
        bound = std::min(bound, open.top().bound);
        open.pop();
      }
    }
    result_.bound = std::min(bound, result_.objective);
    result_.wall_time = elapsed();

    if (!result_.has_incumbent()) {
      result_.bound = limit_hit ? bound : kInf;
      result_.status = limit_hit ? limit_status : SolveStatus::Infeasible;
      return result_;
    }
    const double gap = result_.gap();
    if (gap <= kProvenGap) {
      result_.status = SolveStatus::Optimal;
    } else if (gap <= opt_.relative_gap) {
      result_.status = SolveStatus::GapLimit;
    } else {
      result_.status = limit_status;
    }
    return result_;
  }

 private:
  static LpOptions lp_options(const SolveOptions& opt) {
    LpOptions o;
    o.primal_tolerance = opt.feasibility_tolerance;
    return o;
  }

  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

  bool prunable(double bound) const {
    if (!result_.has_incumbent()) return false;
    return bound >= result_.objective - opt_.relative_gap * std::max(1.0, std::abs(result_.objective));
  }

  void apply(const Node& node) {
    lp_.reset_bounds();
    for (auto [col, side] : node.fixes) lp_.set_col_bounds(col, side, side);
  }

  LpResult solve_node(const Node& node) {
    apply(node);
    LpResult lp = lp_.solve(node.basis.get(), hint_);
    if (lp.status == LpStatus::NumericalFailure || lp.status == LpStatus::IterationLimit) {
      lp = lp_.solve(nullptr, hint_);
    }
    result_.lp_iterations += lp.iterations;
    return lp;
  }

  // Selection column whose cost-weighted product error d_i |h_i - x_i s_i|
  // is largest; -1 when the model has no edge layout.
  int largest_envelope_gap(const std::vector<double>& values) const {
    const ModelLayout& L = model_.layout();
    int best = -1;
    double score = 0.0;
    for (size_t e = 0; e < L.x.size(); ++e) {
      const int x = L.x[e];
      if (x < 0 || e >= L.h.size() || e >= L.s.size() || L.h[e] < 0 || L.s[e] < 0) continue;
      const double h = values[static_cast<size_t>(L.h[e])];
      const double xs = values[static_cast<size_t>(x)] * values[static_cast<size_t>(L.s[e])];
      const double gap = std::abs(model_.variables()[static_cast<size_t>(L.h[e])].cost) * std::abs(h - xs);
      if (gap > score) {
        score = gap;
        best = x;
      }
    }
    return best;
  }

  int most_fractional(const std::vector<double>& values, double threshold) const {
    int best = -1;
    double score = threshold;
    for (int j : integers_) {
      const double v = values[static_cast<size_t>(j)];
      const double f = std::abs(v - std::round(v));
      if (f > score) {
        score = f;
        best = j;
      }
    }
    return best;
  }

  // Fixes every integer column at its rounded value and re-solves, so the
  // stored incumbent is an exact LP optimum for its integer assignment.
  // Returns the objective of that assignment (infinity if infeasible).
  double polish(const LpResult& lp) {
    lp_.reset_bounds();
    for (int j : integers_) {
      const double v = std::round(lp.values[static_cast<size_t>(j)]);
      lp_.set_col_bounds(j, v, v);
    }
    LpResult fixed = lp_.solve(&lp.basis, hint_);
    result_.lp_iterations += fixed.iterations;
    if (fixed.status != LpStatus::Optimal) return kInf;
    if (!result_.has_incumbent() || fixed.objective < result_.objective) {
      result_.values = fixed.values;
      for (int j : integers_) result_.values[static_cast<size_t>(j)] = std::round(result_.values[static_cast<size_t>(j)]);
      result_.objective = fixed.objective;
    }
    return fixed.objective;
  }

  const MilpModel& model_;
  SolveOptions opt_;
  const std::vector<double>* hint_;
  SimplexSolver lp_;
  std::vector<int> integers_;
  SolveResult result_;
  long next_id_ = 0;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace

SolveResult solve_milp(const MilpModel& model, const SolveOptions& options, const std::vector<double>* hint) {
  options.validate();
  BranchAndBound bb(model, options, hint);
  return bb.run();
}

}  // namespace kinomesh
