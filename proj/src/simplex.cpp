#include "kinomesh/simplex.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <numeric>

namespace kinomesh {

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "Optimal";
    case LpStatus::Infeasible: return "Infeasible";
    case LpStatus::Unbounded: return "Unbounded";
    case LpStatus::NumericalFailure: return "NumericalFailure";
    case LpStatus::IterationLimit: return "IterationLimit";
  }
  return "?";
}

namespace {

constexpr double kPivotTolerance = 1e-9;
constexpr double kDropTolerance = 1e-14;

struct SparseMatrixCS {
  std::vector<int> start;
  std::vector<int> index;
  std::vector<double> value;
};

using Status = BasisState::Status;

// Factorization of the simplex basis [A_S | -I_L].
//
// Rows whose logical is basic are eliminated explicitly; the remaining
// square kernel A[R_S, S] goes through a sparse LU. Basis changes between
// refactorizations are applied in product form.
class BasisFactor {
 public:
  void init(int m, int n, const SparseMatrixCS* cols) {
    m_ = m;
    n_ = n;
    cols_ = cols;
    row_pos_.assign(static_cast<size_t>(m), -1);
    kernel_row_.assign(static_cast<size_t>(m), -1);
    scratch_.assign(static_cast<size_t>(m), 0.0);
  }

  bool refactor(const std::vector<int>& head) {
    etas_.clear();
    struct_pos_.clear();
    struct_col_.clear();
    std::fill(row_pos_.begin(), row_pos_.end(), -1);
    for (int p = 0; p < m_; ++p) {
      const int j = head[static_cast<size_t>(p)];
      if (j >= n_) {
        row_pos_[static_cast<size_t>(j - n_)] = p;
      } else {
        struct_pos_.push_back(p);
        struct_col_.push_back(j);
      }
    }
    kernel_rows_.clear();
    for (int i = 0; i < m_; ++i) {
      if (row_pos_[static_cast<size_t>(i)] < 0) {
        kernel_row_[static_cast<size_t>(i)] = static_cast<int>(kernel_rows_.size());
        kernel_rows_.push_back(i);
      } else {
        kernel_row_[static_cast<size_t>(i)] = -1;
      }
    }
    const int k = static_cast<int>(struct_pos_.size());
    if (static_cast<int>(kernel_rows_.size()) != k) return false;
    kernel_size_ = k;
    if (k == 0) return true;

    std::vector<Eigen::Triplet<double>> trip;
    for (int c = 0; c < k; ++c) {
      const int j = struct_col_[static_cast<size_t>(c)];
      for (int t = cols_->start[static_cast<size_t>(j)]; t < cols_->start[static_cast<size_t>(j) + 1]; ++t) {
        const int r = kernel_row_[static_cast<size_t>(cols_->index[static_cast<size_t>(t)])];
        if (r >= 0) trip.emplace_back(r, c, cols_->value[static_cast<size_t>(t)]);
      }
    }
    Eigen::SparseMatrix<double> kernel(k, k);
    kernel.setFromTriplets(trip.begin(), trip.end());
    kernel.makeCompressed();
    lu_ = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>>>();
    lu_->analyzePattern(kernel);
    lu_->factorize(kernel);
    if (lu_->info() != Eigen::Success) return false;
    // SparseLU does not always flag tiny pivots; check the diagonal of U.
    const double det = lu_->logAbsDeterminant();
    if (!std::isfinite(det)) return false;
    rhs_.resize(k);
    return true;
  }

  // Solves B y = a. `a` is indexed by row, the result by basis position.
  void ftran(const std::vector<double>& a, std::vector<double>& y) {
    y.assign(static_cast<size_t>(m_), 0.0);
    std::fill(scratch_.begin(), scratch_.end(), 0.0);
    if (kernel_size_ > 0) {
      for (int r = 0; r < kernel_size_; ++r) rhs_[r] = a[static_cast<size_t>(kernel_rows_[static_cast<size_t>(r)])];
      sol_ = lu_->solve(rhs_);
      for (int c = 0; c < kernel_size_; ++c) {
        const double v = sol_[c];
        y[static_cast<size_t>(struct_pos_[static_cast<size_t>(c)])] = v;
        if (v == 0.0) continue;
        const int j = struct_col_[static_cast<size_t>(c)];
        for (int t = cols_->start[static_cast<size_t>(j)]; t < cols_->start[static_cast<size_t>(j) + 1]; ++t) {
          scratch_[static_cast<size_t>(cols_->index[static_cast<size_t>(t)])] += cols_->value[static_cast<size_t>(t)] * v;
        }
      }
    }
    for (int i = 0; i < m_; ++i) {
      const int p = row_pos_[static_cast<size_t>(i)];
      if (p >= 0) y[static_cast<size_t>(p)] = scratch_[static_cast<size_t>(i)] - a[static_cast<size_t>(i)];
    }
    for (const Eta& e : etas_) {
      double& yp = y[static_cast<size_t>(e.pos)];
      if (yp == 0.0) continue;
      yp /= e.pivot;
      const double v = yp;
      for (size_t t = 0; t < e.index.size(); ++t) y[static_cast<size_t>(e.index[t])] -= e.value[t] * v;
    }
  }

  // Solves B^T z = c. `c` is indexed by basis position, the result by row.
  void btran(std::vector<double> c, std::vector<double>& z) {
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
      double s = c[static_cast<size_t>(it->pos)];
      for (size_t t = 0; t < it->index.size(); ++t) s -= it->value[t] * c[static_cast<size_t>(it->index[t])];
      c[static_cast<size_t>(it->pos)] = s / it->pivot;
    }
    z.assign(static_cast<size_t>(m_), 0.0);
    for (int i = 0; i < m_; ++i) {
      const int p = row_pos_[static_cast<size_t>(i)];
      if (p >= 0) z[static_cast<size_t>(i)] = -c[static_cast<size_t>(p)];
    }
    if (kernel_size_ == 0) return;
    for (int col = 0; col < kernel_size_; ++col) {
      const int j = struct_col_[static_cast<size_t>(col)];
      double s = c[static_cast<size_t>(struct_pos_[static_cast<size_t>(col)])];
      for (int t = cols_->start[static_cast<size_t>(j)]; t < cols_->start[static_cast<size_t>(j) + 1]; ++t) {
        const int i = cols_->index[static_cast<size_t>(t)];
        if (row_pos_[static_cast<size_t>(i)] >= 0) s -= cols_->value[static_cast<size_t>(t)] * z[static_cast<size_t>(i)];
      }
      rhs_[col] = s;
    }
    sol_ = lu_->transpose().solve(rhs_);
    for (int r = 0; r < kernel_size_; ++r) z[static_cast<size_t>(kernel_rows_[static_cast<size_t>(r)])] = sol_[r];
  }

  void push_eta(int pos, const std::vector<double>& alpha) {
    Eta e;
    e.pos = pos;
    e.pivot = alpha[static_cast<size_t>(pos)];
    for (int i = 0; i < m_; ++i) {
      if (i != pos && std::abs(alpha[static_cast<size_t>(i)]) > kDropTolerance) {
        e.index.push_back(i);
        e.value.push_back(alpha[static_cast<size_t>(i)]);
      }
    }
    etas_.push_back(std::move(e));
  }

  int num_etas() const { return static_cast<int>(etas_.size()); }

 private:
  struct Eta {
    int pos = 0;
    double pivot = 1.0;
    std::vector<int> index;
    std::vector<double> value;
  };

  int m_ = 0;
  int n_ = 0;
  const SparseMatrixCS* cols_ = nullptr;
  std::vector<int> row_pos_;     // position of the row's logical, or -1
  std::vector<int> kernel_row_;  // kernel index of a row, or -1
  std::vector<int> kernel_rows_;
  std::vector<int> struct_pos_;
  std::vector<int> struct_col_;
  int kernel_size_ = 0;
  std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>>> lu_;
  Eigen::VectorXd rhs_;
  Eigen::VectorXd sol_;
  std::vector<double> scratch_;
  std::vector<Eta> etas_;
};

double pow2_round(double s) {
  if (!(s > 0.0) || !std::isfinite(s)) return 1.0;
  return std::ldexp(1.0, static_cast<int>(std::lround(std::log2(s))));
}

// Deterministic value in [0, 1) from an index.
double hashed_unit(std::uint64_t i) {
  i += 0x9E3779B97F4A7C15ULL;
  i = (i ^ (i >> 30)) * 0xBF58476D1CE4E5B9ULL;
  i = (i ^ (i >> 27)) * 0x94D049BB133111EBULL;
  i ^= i >> 31;
  return static_cast<double>(i >> 11) * 0x1.0p-53;
}

}  // namespace

struct SimplexSolver::Impl {
  LpOptions opt;
  int m = 0;
  int n = 0;
  int total = 0;
  SparseMatrixCS cols;  // scaled, column-wise
  SparseMatrixCS rows;  // scaled, row-wise
  std::vector<double> col_scale, row_scale;
  std::vector<double> base_lower, base_upper;  // scaled bounds from the model
  std::vector<double> lower, upper;            // scaled working bounds
  std::vector<double> cost_model;              // scaled, unperturbed
  std::vector<double> cost;                    // working (perturbed/shifted)
  std::vector<double> unscaled_cost;

  std::vector<std::int8_t> status;
  std::vector<int> head;
  std::vector<int> pos;
  std::vector<double> x;
  std::vector<double> d;
  std::vector<double> weight;
  BasisFactor factor;
  bool cost_modified = false;

  // workspace
  std::vector<double> rho, alpha_col, alpha_row, tau, work_row, work_pos;
  std::vector<int> touched;

  explicit Impl(const MilpModel& model, LpOptions options) : opt(options) {
    n = model.num_vars();
    m = model.num_rows();
    total = n + m;

    // Column-wise raw matrix, merging duplicate terms.
    std::vector<std::vector<std::pair<int, double>>> colv(static_cast<size_t>(n));
    for (int i = 0; i < m; ++i) {
      for (const Term& t : model.rows()[static_cast<size_t>(i)].terms) {
        auto& c = colv[static_cast<size_t>(t.var)];
        if (!c.empty() && c.back().first == i) {
          c.back().second += t.coef;
        } else {
          c.emplace_back(i, t.coef);
        }
      }
    }
    for (auto& c : colv) {
      c.erase(std::remove_if(c.begin(), c.end(), [](const auto& e) { return e.second == 0.0; }), c.end());
    }

    compute_scaling(colv);

    cols.start.assign(static_cast<size_t>(n) + 1, 0);
    for (int j = 0; j < n; ++j) {
      cols.start[static_cast<size_t>(j) + 1] = cols.start[static_cast<size_t>(j)] + static_cast<int>(colv[static_cast<size_t>(j)].size());
    }
    cols.index.resize(static_cast<size_t>(cols.start.back()));
    cols.value.resize(static_cast<size_t>(cols.start.back()));
    std::vector<int> row_count(static_cast<size_t>(m), 0);
    for (int j = 0; j < n; ++j) {
      int t = cols.start[static_cast<size_t>(j)];
      for (auto [i, a] : colv[static_cast<size_t>(j)]) {
        cols.index[static_cast<size_t>(t)] = i;
        cols.value[static_cast<size_t>(t)] = a * row_scale[static_cast<size_t>(i)] * col_scale[static_cast<size_t>(j)];
        ++row_count[static_cast<size_t>(i)];
        ++t;
      }
    }
    rows.start.assign(static_cast<size_t>(m) + 1, 0);
    for (int i = 0; i < m; ++i) rows.start[static_cast<size_t>(i) + 1] = rows.start[static_cast<size_t>(i)] + row_count[static_cast<size_t>(i)];
    rows.index.resize(cols.index.size());
    rows.value.resize(cols.value.size());
    std::vector<int> fill(rows.start.begin(), rows.start.end() - 1);
    for (int j = 0; j < n; ++j) {
      for (int t = cols.start[static_cast<size_t>(j)]; t < cols.start[static_cast<size_t>(j) + 1]; ++t) {
        const int i = cols.index[static_cast<size_t>(t)];
        const int slot = fill[static_cast<size_t>(i)]++;
        rows.index[static_cast<size_t>(slot)] = j;
        rows.value[static_cast<size_t>(slot)] = cols.value[static_cast<size_t>(t)];
      }
    }

    base_lower.resize(static_cast<size_t>(total));
    base_upper.resize(static_cast<size_t>(total));
    cost_model.assign(static_cast<size_t>(total), 0.0);
    unscaled_cost.assign(static_cast<size_t>(n), 0.0);
    for (int j = 0; j < n; ++j) {
      const Variable& v = model.variables()[static_cast<size_t>(j)];
      const double cs = col_scale[static_cast<size_t>(j)];
      base_lower[static_cast<size_t>(j)] = v.lower / cs;
      base_upper[static_cast<size_t>(j)] = v.upper / cs;
      cost_model[static_cast<size_t>(j)] = v.cost * cs;
      unscaled_cost[static_cast<size_t>(j)] = v.cost;
    }
    for (int i = 0; i < m; ++i) {
      const Constraint& c = model.rows()[static_cast<size_t>(i)];
      const double rs = row_scale[static_cast<size_t>(i)];
      const double rhs = c.rhs * rs;
      base_lower[static_cast<size_t>(n + i)] = c.sense == Sense::LessEqual ? -kInf : rhs;
      base_upper[static_cast<size_t>(n + i)] = c.sense == Sense::GreaterEqual ? kInf : rhs;
    }
    lower = base_lower;
    upper = base_upper;
    factor.init(m, n, &cols);
  }

  void compute_scaling(const std::vector<std::vector<std::pair<int, double>>>& colv) {
    row_scale.assign(static_cast<size_t>(m), 1.0);
    col_scale.assign(static_cast<size_t>(n), 1.0);
    std::vector<double> rmax(static_cast<size_t>(m)), rmin(static_cast<size_t>(m));
    for (int pass = 0; pass < 6; ++pass) {
      std::fill(rmax.begin(), rmax.end(), 0.0);
      std::fill(rmin.begin(), rmin.end(), kInf);
      for (int j = 0; j < n; ++j) {
        for (auto [i, a] : colv[static_cast<size_t>(j)]) {
          const double v = std::abs(a) * col_scale[static_cast<size_t>(j)];
          rmax[static_cast<size_t>(i)] = std::max(rmax[static_cast<size_t>(i)], v);
          rmin[static_cast<size_t>(i)] = std::min(rmin[static_cast<size_t>(i)], v);
        }
      }
      for (int i = 0; i < m; ++i) {
        if (rmax[static_cast<size_t>(i)] > 0.0) {
          row_scale[static_cast<size_t>(i)] = 1.0 / std::sqrt(rmax[static_cast<size_t>(i)] * rmin[static_cast<size_t>(i)]);
        }
      }
      for (int j = 0; j < n; ++j) {
        double cmax = 0.0, cmin = kInf;
        for (auto [i, a] : colv[static_cast<size_t>(j)]) {
          const double v = std::abs(a) * row_scale[static_cast<size_t>(i)];
          cmax = std::max(cmax, v);
          cmin = std::min(cmin, v);
        }
        if (cmax > 0.0) col_scale[static_cast<size_t>(j)] = 1.0 / std::sqrt(cmax * cmin);
      }
    }
    for (auto& s : row_scale) s = pow2_round(s);
    for (auto& s : col_scale) s = pow2_round(s);
  }

  // ---- basic helpers ------------------------------------------------------

  bool is_fixed(int j) const { return lower[static_cast<size_t>(j)] == upper[static_cast<size_t>(j)]; }

  double nonbasic_value(int j) const {
    switch (status[static_cast<size_t>(j)]) {
      case Status::AtLower: return lower[static_cast<size_t>(j)];
      case Status::AtUpper: return upper[static_cast<size_t>(j)];
      default: return 0.0;
    }
  }

  // Picks a legal nonbasic status for column j given a preferred one.
  std::int8_t legal_status(int j, std::int8_t want) const {
    const bool lo = std::isfinite(lower[static_cast<size_t>(j)]);
    const bool up = std::isfinite(upper[static_cast<size_t>(j)]);
    if (want == Status::AtLower && lo) return Status::AtLower;
    if (want == Status::AtUpper && up) return Status::AtUpper;
    if (lo) return Status::AtLower;
    if (up) return Status::AtUpper;
    return Status::AtZero;
  }

  // Adds column j (scaled) times `scale` into a row-space vector.
  void add_column(int j, double scale, std::vector<double>& out) const {
    if (j >= n) {
      out[static_cast<size_t>(j - n)] -= scale;
      return;
    }
    for (int t = cols.start[static_cast<size_t>(j)]; t < cols.start[static_cast<size_t>(j) + 1]; ++t) {
      out[static_cast<size_t>(cols.index[static_cast<size_t>(t)])] += cols.value[static_cast<size_t>(t)] * scale;
    }
  }

  double column_dot(int j, const std::vector<double>& y) const {
    if (j >= n) return -y[static_cast<size_t>(j - n)];
    double s = 0.0;
    for (int t = cols.start[static_cast<size_t>(j)]; t < cols.start[static_cast<size_t>(j) + 1]; ++t) {
      s += cols.value[static_cast<size_t>(t)] * y[static_cast<size_t>(cols.index[static_cast<size_t>(t)])];
    }
    return s;
  }

  void cold_basis(const std::vector<double>* hint) {
    status.assign(static_cast<size_t>(total), Status::Basic);
    head.resize(static_cast<size_t>(m));
    pos.assign(static_cast<size_t>(total), -1);
    for (int j = 0; j < n; ++j) {
      const double c = cost_model[static_cast<size_t>(j)];
      std::int8_t want = Status::AtLower;
      if (c < 0.0) {
        want = Status::AtUpper;
      } else if (c == 0.0 && hint != nullptr) {
        const double h = (*hint)[static_cast<size_t>(j)] / col_scale[static_cast<size_t>(j)];
        const double lo = lower[static_cast<size_t>(j)];
        const double up = upper[static_cast<size_t>(j)];
        if (std::isfinite(up) && (!std::isfinite(lo) || std::abs(up - h) < std::abs(h - lo))) want = Status::AtUpper;
      }
      status[static_cast<size_t>(j)] = legal_status(j, want);
    }
    for (int i = 0; i < m; ++i) {
      head[static_cast<size_t>(i)] = n + i;
      pos[static_cast<size_t>(n + i)] = i;
    }
    weight.assign(static_cast<size_t>(m), 1.0);
  }

  bool warm_basis(const BasisState& warm) {
    if (static_cast<int>(warm.status.size()) != total) return false;
    int basics = 0;
    for (auto s : warm.status) basics += s == Status::Basic;
    if (basics != m) return false;
    status = warm.status;
    head.clear();
    pos.assign(static_cast<size_t>(total), -1);
    for (int j = 0; j < total; ++j) {
      if (status[static_cast<size_t>(j)] == Status::Basic) {
        pos[static_cast<size_t>(j)] = static_cast<int>(head.size());
        head.push_back(j);
      } else {
        status[static_cast<size_t>(j)] = legal_status(j, status[static_cast<size_t>(j)]);
      }
    }
    weight.assign(static_cast<size_t>(m), 1.0);
    return true;
  }

  void compute_primal() {
    work_row.assign(static_cast<size_t>(m), 0.0);
    for (int j = 0; j < total; ++j) {
      if (status[static_cast<size_t>(j)] == Status::Basic) continue;
      const double v = nonbasic_value(j);
      x[static_cast<size_t>(j)] = v;
      if (v != 0.0) add_column(j, -v, work_row);
    }
    factor.ftran(work_row, work_pos);
    for (int p = 0; p < m; ++p) x[static_cast<size_t>(head[static_cast<size_t>(p)])] = work_pos[static_cast<size_t>(p)];
  }

  void compute_duals() {
    work_pos.resize(static_cast<size_t>(m));
    for (int p = 0; p < m; ++p) work_pos[static_cast<size_t>(p)] = cost[static_cast<size_t>(head[static_cast<size_t>(p)])];
    std::vector<double> y;
    factor.btran(work_pos, y);
    for (int j = 0; j < total; ++j) {
      d[static_cast<size_t>(j)] = status[static_cast<size_t>(j)] == Status::Basic ? 0.0 : cost[static_cast<size_t>(j)] - column_dot(j, y);
    }
  }

  // Restores dual feasibility by bound flips (boxed) or cost shifts.
  // Returns true when any nonbasic value moved.
  bool correct_duals() {
    bool moved = false;
    const double tol = opt.dual_tolerance;
    for (int j = 0; j < total; ++j) {
      const auto s = status[static_cast<size_t>(j)];
      if (s == Status::Basic || is_fixed(j)) continue;
      double& dj = d[static_cast<size_t>(j)];
      const bool lo = std::isfinite(lower[static_cast<size_t>(j)]);
      const bool up = std::isfinite(upper[static_cast<size_t>(j)]);
      if (s == Status::AtLower && dj < -tol) {
        if (up) {
          status[static_cast<size_t>(j)] = Status::AtUpper;
          moved = true;
        } else {
          shift_cost(j, -dj);
        }
      } else if (s == Status::AtUpper && dj > tol) {
        if (lo) {
          status[static_cast<size_t>(j)] = Status::AtLower;
          moved = true;
        } else {
          shift_cost(j, -dj);
        }
      } else if (s == Status::AtZero && std::abs(dj) > tol) {
        shift_cost(j, -dj);
      }
    }
    return moved;
  }

  void shift_cost(int j, double amount) {
    cost[static_cast<size_t>(j)] += amount;
    d[static_cast<size_t>(j)] += amount;
    cost_modified = true;
  }

  void perturb() {
    double cmax = 0.0;
    for (int j = 0; j < n; ++j) cmax = std::max(cmax, std::abs(cost_model[static_cast<size_t>(j)]));
    const double base = 5e-7 * std::max(1.0, cmax);
    for (int j = 0; j < n; ++j) {
      if (is_fixed(j)) continue;
      const double xi = base * (1.0 + hashed_unit(static_cast<std::uint64_t>(j))) *
                        (1.0 + std::abs(cost_model[static_cast<size_t>(j)]) / std::max(1.0, cmax));
      const auto s = status[static_cast<size_t>(j)];
      if (s == Status::AtUpper) {
        cost[static_cast<size_t>(j)] -= xi;
      } else if (s == Status::AtLower) {
        cost[static_cast<size_t>(j)] += xi;
      }
    }
    cost_modified = true;
  }

  bool reinvert() {
    if (!factor.refactor(head)) {
      // Singular basis: fall back to the slack basis, which is always valid.
      for (int j = 0; j < n; ++j) {
        if (status[static_cast<size_t>(j)] == Status::Basic) {
          status[static_cast<size_t>(j)] = legal_status(j, d[static_cast<size_t>(j)] < 0.0 ? Status::AtUpper : Status::AtLower);
        }
        pos[static_cast<size_t>(j)] = -1;
      }
      for (int i = 0; i < m; ++i) {
        status[static_cast<size_t>(n + i)] = Status::Basic;
        head[static_cast<size_t>(i)] = n + i;
        pos[static_cast<size_t>(n + i)] = i;
      }
      weight.assign(static_cast<size_t>(m), 1.0);
      if (!factor.refactor(head)) return false;
    }
    compute_primal();
    compute_duals();
    if (correct_duals()) compute_primal();
    return true;
  }

  double primal_infeasibility(int j) const {
    const double v = x[static_cast<size_t>(j)];
    if (v < lower[static_cast<size_t>(j)] - opt.primal_tolerance) return lower[static_cast<size_t>(j)] - v;
    if (v > upper[static_cast<size_t>(j)] + opt.primal_tolerance) return v - upper[static_cast<size_t>(j)];
    return 0.0;
  }

  bool primal_feasible() const {
    for (int p = 0; p < m; ++p) {
      if (primal_infeasibility(head[static_cast<size_t>(p)]) > 0.0) return false;
    }
    return true;
  }

  bool dual_feasible() const {
    const double tol = opt.dual_tolerance;
    for (int j = 0; j < total; ++j) {
      const auto s = status[static_cast<size_t>(j)];
      if (s == Status::Basic || is_fixed(j)) continue;
      const double dj = d[static_cast<size_t>(j)];
      if ((s == Status::AtLower && dj < -tol) || (s == Status::AtUpper && dj > tol) ||
          (s == Status::AtZero && std::abs(dj) > tol)) {
        return false;
      }
    }
    return true;
  }

  // alpha_row[j] = rho^T a_j over nonbasic columns; touched lists them.
  void compute_pivot_row() {
    for (int j : touched) alpha_row[static_cast<size_t>(j)] = 0.0;
    touched.clear();
    for (int i = 0; i < m; ++i) {
      const double r = rho[static_cast<size_t>(i)];
      if (r == 0.0) continue;
      for (int t = rows.start[static_cast<size_t>(i)]; t < rows.start[static_cast<size_t>(i) + 1]; ++t) {
        const int j = rows.index[static_cast<size_t>(t)];
        if (status[static_cast<size_t>(j)] == Status::Basic) continue;
        if (alpha_row[static_cast<size_t>(j)] == 0.0) touched.push_back(j);
        alpha_row[static_cast<size_t>(j)] += r * rows.value[static_cast<size_t>(t)];
        if (alpha_row[static_cast<size_t>(j)] == 0.0) alpha_row[static_cast<size_t>(j)] = 1e-300;
      }
      const int logical = n + i;
      if (status[static_cast<size_t>(logical)] != Status::Basic) {
        if (alpha_row[static_cast<size_t>(logical)] == 0.0) touched.push_back(logical);
        alpha_row[static_cast<size_t>(logical)] = -r;
      }
    }
  }

  void replace_basic(int p, int q, int leaving, std::int8_t leaving_status) {
    head[static_cast<size_t>(p)] = q;
    pos[static_cast<size_t>(q)] = p;
    pos[static_cast<size_t>(leaving)] = -1;
    status[static_cast<size_t>(q)] = Status::Basic;
    status[static_cast<size_t>(leaving)] = leaving_status;
    d[static_cast<size_t>(q)] = 0.0;
    factor.push_eta(p, alpha_col);
  }

  // ---- dual simplex -------------------------------------------------------

  struct Candidate {
    int j;
    double ratio;
    double abs_alpha;
  };

  LpStatus dual_phase(long& iter, long max_iter) {
    const double ptol = opt.primal_tolerance;
    const double dtol = opt.dual_tolerance;
    int stall = 0;
    bool bland = false;
    std::vector<Candidate> cand;
    std::vector<int> flips;
    while (true) {
      if (iter >= max_iter) return LpStatus::IterationLimit;
      if (factor.num_etas() >= opt.refactor_interval) {
        if (!reinvert()) return LpStatus::NumericalFailure;
      }

      // Leaving row.
      int p = -1;
      double best = 0.0;
      for (int i = 0; i < m; ++i) {
        const int j = head[static_cast<size_t>(i)];
        const double inf = primal_infeasibility(j);
        if (inf <= 0.0) continue;
        if (bland) {
          if (p < 0 || j < head[static_cast<size_t>(p)]) p = i;
        } else {
          const double score = inf * inf / weight[static_cast<size_t>(i)];
          if (score > best) {
            best = score;
            p = i;
          }
        }
      }
      if (p < 0) return LpStatus::Optimal;
      const int r = head[static_cast<size_t>(p)];
      const bool to_upper = x[static_cast<size_t>(r)] > upper[static_cast<size_t>(r)];

      work_pos.assign(static_cast<size_t>(m), 0.0);
      work_pos[static_cast<size_t>(p)] = 1.0;
      factor.btran(work_pos, rho);
      compute_pivot_row();

      // Candidates: d_j - t * alpha~_j must keep its sign for t >= 0.
      cand.clear();
      for (int j : touched) {
        if (is_fixed(j)) continue;
        const double a = to_upper ? alpha_row[static_cast<size_t>(j)] : -alpha_row[static_cast<size_t>(j)];
        if (std::abs(a) <= kPivotTolerance) continue;
        const auto s = status[static_cast<size_t>(j)];
        const double dj = d[static_cast<size_t>(j)];
        if ((s == Status::AtLower && a > 0.0) || (s == Status::AtUpper && a < 0.0) || s == Status::AtZero) {
          cand.push_back({j, std::max(0.0, dj / a), std::abs(a)});
          if (s == Status::AtZero) cand.back().ratio = std::abs(dj) / std::abs(a);
        }
      }
      if (cand.empty()) return LpStatus::Infeasible;

      std::sort(cand.begin(), cand.end(), [](const Candidate& a, const Candidate& b) {
        return a.ratio < b.ratio || (a.ratio == b.ratio && a.j < b.j);
      });

      double slope = std::abs(x[static_cast<size_t>(r)] - (to_upper ? upper[static_cast<size_t>(r)] : lower[static_cast<size_t>(r)]));
      flips.clear();
      int q = -1;
      size_t k = 0;
      if (bland) {
        const double rmin = cand.front().ratio;
        for (const auto& c : cand) {
          if (c.ratio > rmin) break;
          if (q < 0 || c.j < q) q = c.j;
        }
      } else {
        while (k < cand.size()) {
          double harris = kInf;
          for (size_t t = k; t < cand.size(); ++t) {
            const Candidate& c = cand[t];
            harris = std::min(harris, (std::abs(d[static_cast<size_t>(c.j)]) + dtol) / c.abs_alpha);
            if (c.ratio > harris) break;
          }
          size_t end = k;
          double drop = 0.0;
          bool boxed = true;
          while (end < cand.size() && cand[end].ratio <= harris) {
            const int j = cand[end].j;
            const double range = upper[static_cast<size_t>(j)] - lower[static_cast<size_t>(j)];
            if (!std::isfinite(range)) boxed = false;
            drop += range * cand[end].abs_alpha;
            ++end;
          }
          if (end == k) end = k + 1;  // ratios above the Harris bound: take the next one
          if (boxed && end < cand.size() && slope - drop > 0.0) {
            for (size_t t = k; t < end; ++t) flips.push_back(cand[t].j);
            slope -= drop;
            k = end;
            continue;
          }
          double best_alpha = -1.0;
          for (size_t t = k; t < end; ++t) {
            if (cand[t].abs_alpha > best_alpha) {
              best_alpha = cand[t].abs_alpha;
              q = cand[t].j;
            }
          }
          break;
        }
        if (q < 0) return LpStatus::Infeasible;
      }

      // Entering column.
      work_row.assign(static_cast<size_t>(m), 0.0);
      add_column(q, 1.0, work_row);
      factor.ftran(work_row, alpha_col);
      const double pivot = alpha_col[static_cast<size_t>(p)];
      const double pivot_row = alpha_row[static_cast<size_t>(q)];
      if (std::abs(pivot) <= kPivotTolerance ||
          std::abs(pivot - pivot_row) > 1e-7 * (1.0 + std::abs(pivot))) {
        if (factor.num_etas() == 0) return LpStatus::NumericalFailure;
        if (!reinvert()) return LpStatus::NumericalFailure;
        continue;
      }

      const double aq = to_upper ? pivot_row : -pivot_row;
      const double t_step = status[static_cast<size_t>(q)] == Status::AtZero
                                ? d[static_cast<size_t>(q)] / aq
                                : std::max(0.0, d[static_cast<size_t>(q)] / aq);

      // Bound flips.
      if (!flips.empty()) {
        work_row.assign(static_cast<size_t>(m), 0.0);
        for (int j : flips) {
          const double delta = status[static_cast<size_t>(j)] == Status::AtLower
                                   ? upper[static_cast<size_t>(j)] - lower[static_cast<size_t>(j)]
                                   : lower[static_cast<size_t>(j)] - upper[static_cast<size_t>(j)];
          status[static_cast<size_t>(j)] = status[static_cast<size_t>(j)] == Status::AtLower ? Status::AtUpper : Status::AtLower;
          x[static_cast<size_t>(j)] = nonbasic_value(j);
          add_column(j, delta, work_row);
        }
        factor.ftran(work_row, work_pos);
        for (int i = 0; i < m; ++i) x[static_cast<size_t>(head[static_cast<size_t>(i)])] -= work_pos[static_cast<size_t>(i)];
      }

      // Dual update.
      const double theta = to_upper ? t_step : -t_step;
      for (int j : touched) {
        if (status[static_cast<size_t>(j)] != Status::Basic) d[static_cast<size_t>(j)] -= theta * alpha_row[static_cast<size_t>(j)];
      }

      // Steepest-edge weights.
      double rho_norm2 = 0.0;
      for (double v : rho) rho_norm2 += v * v;
      factor.ftran(rho, tau);
      for (int i = 0; i < m; ++i) {
        if (i == p) continue;
        const double ai = alpha_col[static_cast<size_t>(i)];
        if (ai == 0.0) continue;
        const double ratio = ai / pivot;
        double w = weight[static_cast<size_t>(i)] - 2.0 * ratio * tau[static_cast<size_t>(i)] + ratio * ratio * rho_norm2;
        weight[static_cast<size_t>(i)] = std::max(w, 1e-8);
      }
      weight[static_cast<size_t>(p)] = std::max(rho_norm2 / (pivot * pivot), 1e-8);

      // Primal step.
      const double bound = to_upper ? upper[static_cast<size_t>(r)] : lower[static_cast<size_t>(r)];
      const double step = (x[static_cast<size_t>(r)] - bound) / pivot;
      for (int i = 0; i < m; ++i) {
        const double ai = alpha_col[static_cast<size_t>(i)];
        if (ai != 0.0) x[static_cast<size_t>(head[static_cast<size_t>(i)])] -= step * ai;
      }
      x[static_cast<size_t>(q)] += step;
      x[static_cast<size_t>(r)] = bound;
      d[static_cast<size_t>(r)] = -theta;
      replace_basic(p, q, r, to_upper ? Status::AtUpper : Status::AtLower);
      ++iter;

      if (t_step * slope > 1e-12 * (1.0 + std::abs(t_step))) {
        stall = 0;
        bland = false;
      } else if (++stall > opt.stall_limit) {
        bland = true;
      }
      (void)ptol;
    }
  }

  // ---- primal simplex (from a primal feasible basis) ----------------------

  LpStatus primal_phase(long& iter, long max_iter) {
    const double ptol = opt.primal_tolerance;
    const double dtol = opt.dual_tolerance;
    int stall = 0;
    bool bland = false;
    while (true) {
      if (iter >= max_iter) return LpStatus::IterationLimit;
      if (factor.num_etas() >= opt.refactor_interval) {
        if (!factor.refactor(head)) return LpStatus::NumericalFailure;
        compute_primal();
        compute_duals();
      }
      int q = -1;
      double best = 0.0;
      for (int j = 0; j < total; ++j) {
        const auto s = status[static_cast<size_t>(j)];
        if (s == Status::Basic || is_fixed(j)) continue;
        const double dj = d[static_cast<size_t>(j)];
        double infeas = 0.0;
        if ((s == Status::AtLower || s == Status::AtZero) && dj < -dtol) infeas = -dj;
        if ((s == Status::AtUpper || s == Status::AtZero) && dj > dtol) infeas = dj;
        if (infeas <= 0.0) continue;
        if (bland) {
          q = j;
          break;
        }
        if (infeas > best) {
          best = infeas;
          q = j;
        }
      }
      if (q < 0) return LpStatus::Optimal;
      const double dir = d[static_cast<size_t>(q)] < 0.0 ? 1.0 : -1.0;

      work_row.assign(static_cast<size_t>(m), 0.0);
      add_column(q, 1.0, work_row);
      factor.ftran(work_row, alpha_col);

      // Harris two-pass ratio test over the basics.
      double harris = kInf;
      for (int i = 0; i < m; ++i) {
        const double a = dir * alpha_col[static_cast<size_t>(i)];
        if (std::abs(a) <= kPivotTolerance) continue;
        const int j = head[static_cast<size_t>(i)];
        if (a > 0.0 && std::isfinite(lower[static_cast<size_t>(j)])) {
          harris = std::min(harris, (x[static_cast<size_t>(j)] - lower[static_cast<size_t>(j)] + ptol) / a);
        } else if (a < 0.0 && std::isfinite(upper[static_cast<size_t>(j)])) {
          harris = std::min(harris, (upper[static_cast<size_t>(j)] - x[static_cast<size_t>(j)] + ptol) / -a);
        }
      }
      int p = -1;
      double theta = kInf;
      double best_alpha = 0.0;
      bool leave_upper = false;
      for (int i = 0; i < m; ++i) {
        const double a = dir * alpha_col[static_cast<size_t>(i)];
        if (std::abs(a) <= kPivotTolerance) continue;
        const int j = head[static_cast<size_t>(i)];
        double ratio = kInf;
        bool up = false;
        if (a > 0.0 && std::isfinite(lower[static_cast<size_t>(j)])) {
          ratio = (x[static_cast<size_t>(j)] - lower[static_cast<size_t>(j)]) / a;
        } else if (a < 0.0 && std::isfinite(upper[static_cast<size_t>(j)])) {
          ratio = (upper[static_cast<size_t>(j)] - x[static_cast<size_t>(j)]) / -a;
          up = true;
        }
        if (!std::isfinite(ratio) || ratio > harris) continue;
        const bool better = bland ? (p < 0 || j < head[static_cast<size_t>(p)]) : std::abs(a) > best_alpha;
        if (better) {
          best_alpha = std::abs(a);
          p = i;
          theta = std::max(0.0, ratio);
          leave_upper = up;
        }
      }
      const double range = upper[static_cast<size_t>(q)] - lower[static_cast<size_t>(q)];
      if (p < 0 && !std::isfinite(range)) return LpStatus::Unbounded;

      if (p < 0 || range <= theta) {
        // Entering column just moves to its opposite bound.
        for (int i = 0; i < m; ++i) {
          const double ai = alpha_col[static_cast<size_t>(i)];
          if (ai != 0.0) x[static_cast<size_t>(head[static_cast<size_t>(i)])] -= dir * range * ai;
        }
        status[static_cast<size_t>(q)] = dir > 0.0 ? Status::AtUpper : Status::AtLower;
        x[static_cast<size_t>(q)] = nonbasic_value(q);
        ++iter;
        continue;
      }

      const int r = head[static_cast<size_t>(p)];
      const double pivot = alpha_col[static_cast<size_t>(p)];
      work_pos.assign(static_cast<size_t>(m), 0.0);
      work_pos[static_cast<size_t>(p)] = 1.0;
      factor.btran(work_pos, rho);
      compute_pivot_row();
      const double theta_d = d[static_cast<size_t>(q)] / pivot;
      for (int j : touched) {
        if (status[static_cast<size_t>(j)] != Status::Basic) d[static_cast<size_t>(j)] -= theta_d * alpha_row[static_cast<size_t>(j)];
      }
      const double step = dir * theta;
      for (int i = 0; i < m; ++i) {
        const double ai = alpha_col[static_cast<size_t>(i)];
        if (ai != 0.0) x[static_cast<size_t>(head[static_cast<size_t>(i)])] -= step * ai;
      }
      x[static_cast<size_t>(q)] += step;
      x[static_cast<size_t>(r)] = leave_upper ? upper[static_cast<size_t>(r)] : lower[static_cast<size_t>(r)];
      d[static_cast<size_t>(r)] = -theta_d;
      replace_basic(p, q, r, leave_upper ? Status::AtUpper : Status::AtLower);
      ++iter;
      if (theta > 0.0) {
        stall = 0;
        bland = false;
      } else if (++stall > opt.stall_limit) {
        bland = true;
      }
    }
  }

  LpResult run(const BasisState* warm, const std::vector<double>* hint) {
    LpResult result;
    x.assign(static_cast<size_t>(total), 0.0);
    d.assign(static_cast<size_t>(total), 0.0);
    alpha_row.assign(static_cast<size_t>(total), 0.0);
    touched.clear();
    cost = cost_model;
    cost_modified = false;

    for (int j = 0; j < total; ++j) {
      if (lower[static_cast<size_t>(j)] > upper[static_cast<size_t>(j)] + opt.primal_tolerance) {
        result.status = LpStatus::Infeasible;
        return result;
      }
    }

    if (warm == nullptr || !warm_basis(*warm)) cold_basis(hint);
    if (!reinvert()) {
      result.status = LpStatus::NumericalFailure;
      return result;
    }
    if (opt.perturb_costs) {
      perturb();
      compute_duals();
      if (correct_duals()) compute_primal();
    }

    const long max_iter = opt.max_iterations > 0 ? opt.max_iterations : 50L * (m + n) + 10000;
    long iter = 0;
    LpStatus st = LpStatus::NumericalFailure;
    for (int round = 0; round < 6; ++round) {
      st = dual_phase(iter, max_iter);
      if (st != LpStatus::Optimal) break;
      if (cost_modified) {
        cost = cost_model;
        cost_modified = false;
        if (!factor.refactor(head)) {
          st = LpStatus::NumericalFailure;
          break;
        }
        compute_primal();
        compute_duals();
        if (!primal_feasible()) continue;
        if (!dual_feasible()) {
          st = primal_phase(iter, max_iter);
          if (st != LpStatus::Optimal) break;
        }
      }
      if (!factor.refactor(head)) {
        st = LpStatus::NumericalFailure;
        break;
      }
      compute_primal();
      compute_duals();
      if (primal_feasible() && dual_feasible()) {
        st = LpStatus::Optimal;
        break;
      }
      if (correct_duals()) compute_primal();
      st = LpStatus::NumericalFailure;
    }

    result.status = st;
    result.iterations = iter;
    result.basis.status = status;
    result.values.resize(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) result.values[static_cast<size_t>(j)] = x[static_cast<size_t>(j)] * col_scale[static_cast<size_t>(j)];
    result.row_activity.resize(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i) {
      result.row_activity[static_cast<size_t>(i)] = x[static_cast<size_t>(n + i)] / row_scale[static_cast<size_t>(i)];
    }
    double obj = 0.0;
    for (int j = 0; j < n; ++j) obj += unscaled_cost[static_cast<size_t>(j)] * result.values[static_cast<size_t>(j)];
    result.objective = obj;
    return result;
  }
};

SimplexSolver::SimplexSolver(const MilpModel& model, LpOptions options)
    : impl_(std::make_unique<Impl>(model, options)) {}

SimplexSolver::~SimplexSolver() = default;

int SimplexSolver::num_cols() const { return impl_->n; }
int SimplexSolver::num_rows() const { return impl_->m; }

void SimplexSolver::set_col_bounds(int col, double lower, double upper) {
  const double cs = impl_->col_scale[static_cast<size_t>(col)];
  impl_->lower[static_cast<size_t>(col)] = lower / cs;
  impl_->upper[static_cast<size_t>(col)] = upper / cs;
}

void SimplexSolver::reset_bounds() {
  impl_->lower = impl_->base_lower;
  impl_->upper = impl_->base_upper;
}

double SimplexSolver::col_lower(int col) const {
  return impl_->lower[static_cast<size_t>(col)] * impl_->col_scale[static_cast<size_t>(col)];
}

double SimplexSolver::col_upper(int col) const {
  return impl_->upper[static_cast<size_t>(col)] * impl_->col_scale[static_cast<size_t>(col)];
}

LpResult SimplexSolver::solve(const BasisState* warm, const std::vector<double>* hint) {
  return impl_->run(warm, hint);
}

LpResult solve_lp(const MilpModel& model, const LpOptions& options, const std::vector<double>* hint) {
  SimplexSolver solver(model, options);
  return solver.solve(nullptr, hint);
}

}  // namespace kinomesh
