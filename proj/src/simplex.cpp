// Bounded-variable revised primal simplex.
//
// Rows are written as A x - r = 0 with one logical r_i per row carrying the
// row's bounds, so the all-logical basis is always available as a start.
// Infeasibility is handled by a composite phase 1 that minimizes the sum of
// basic bound violations; phase 2 starts as soon as the basis is feasible.
// The basis inverse is an Eigen SparseLU factorization followed by a
// product-form eta file that is rebuilt every `refactor_interval` pivots.

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>

#include "gamemod/errors.hpp"
#include "gamemod/lp.hpp"

namespace gamemod::lp {

namespace {

enum class VarState : std::uint8_t { Basic, AtLower, AtUpper, Between };

struct Eta {
  int pos;
  double pivot;
  std::vector<int> idx;
  std::vector<double> val;
};

class Simplex {
 public:
  Simplex(const LpModel& model, const SolverOptions& options);

  LpSolution run();

 private:
  int total() const { return n_ + m_; }

  template <typename F>
  void for_column(int j, F&& f) const {
    if (j < n_) {
      for (int k = col_start_[j]; k < col_start_[j + 1]; ++k) f(row_idx_[k], col_val_[k]);
    } else {
      f(j - n_, -1.0);
    }
  }

  void refactor();
  void recompute_basics();
  Eigen::VectorXd ftran(const Eigen::VectorXd& rhs) const;
  Eigen::VectorXd btran(const Eigen::VectorXd& rhs) const;

  bool below(int j) const { return x_[j] < lo_[j] - opt_.primal_tol; }
  bool above(int j) const { return x_[j] > up_[j] + opt_.primal_tol; }
  double infeasibility() const;

  // Chooses an entering variable and its direction; returns -1 when optimal.
  int price(const Eigen::VectorXd& y, bool phase1, bool bland, int& dir) const;
  double reduced_cost(int j, const Eigen::VectorXd& y, bool phase1) const;

  struct Step {
    double theta;
    int leave_pos;  // -1: bound flip or unbounded
    bool unbounded;
    bool leave_to_upper;
  };
  Step ratio_test(int q, int dir, const Eigen::VectorXd& alpha, bool phase1, bool bland) const;
  void pivot(int q, int dir, const Eigen::VectorXd& alpha, const Step& step);
  void push_superbasics();

  const LpModel& model_;
  SolverOptions opt_;
  int n_;
  int m_;
  std::vector<int> col_start_;
  std::vector<int> row_idx_;
  std::vector<double> col_val_;
  std::vector<double> lo_, up_, cost_, x_;
  std::vector<VarState> state_;
  std::vector<int> head_;  // basic variable at each basis position
  std::vector<int> pos_;   // basis position of a variable or -1

  mutable Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
  std::vector<Eta> etas_;
  long iterations_ = 0;
};

Simplex::Simplex(const LpModel& model, const SolverOptions& options)
    : model_(model), opt_(options), n_(model.num_variables()), m_(model.num_constraints()) {
  std::vector<int> counts(n_ + 1, 0);
  for (const auto& row : model.constraints()) {
    for (const auto& t : row.expr) ++counts[t.var + 1];
  }
  col_start_.assign(n_ + 1, 0);
  for (int j = 0; j < n_; ++j) col_start_[j + 1] = col_start_[j] + counts[j + 1];
  row_idx_.resize(col_start_[n_]);
  col_val_.resize(col_start_[n_]);
  std::vector<int> fill(col_start_.begin(), col_start_.end() - 1);
  for (int i = 0; i < m_; ++i) {
    for (const auto& t : model.constraint(i).expr) {
      row_idx_[fill[t.var]] = i;
      col_val_[fill[t.var]++] = t.coef;
    }
  }

  lo_.resize(total());
  up_.resize(total());
  cost_.assign(total(), 0.0);
  x_.assign(total(), 0.0);
  state_.assign(total(), VarState::Between);
  for (int j = 0; j < n_; ++j) {
    const auto& v = model.variable(j);
    lo_[j] = v.lower;
    up_[j] = v.upper;
    cost_[j] = v.cost;
    x_[j] = v.start;
    if (x_[j] == lo_[j]) {
      state_[j] = VarState::AtLower;
    } else if (x_[j] == up_[j]) {
      state_[j] = VarState::AtUpper;
    }
  }
  for (int i = 0; i < m_; ++i) {
    const auto& row = model.constraint(i);
    const int r = n_ + i;
    lo_[r] = row.relation == Relation::LessEqual ? -kInf : row.rhs;
    up_[r] = row.relation == Relation::GreaterEqual ? kInf : row.rhs;
  }

  head_.resize(m_);
  pos_.assign(total(), -1);
  for (int i = 0; i < m_; ++i) {
    head_[i] = n_ + i;
    pos_[n_ + i] = i;
    state_[n_ + i] = VarState::Basic;
  }
  if (opt_.max_iterations < 0) opt_.max_iterations = 50L * (n_ + m_) + 10000;
}

void Simplex::refactor() {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<size_t>(m_) * 3);
  for (int k = 0; k < m_; ++k) {
    for_column(head_[k], [&](int i, double v) { trips.emplace_back(i, k, v); });
  }
  Eigen::SparseMatrix<double> basis(m_, m_);
  basis.setFromTriplets(trips.begin(), trips.end());
  basis.makeCompressed();
  lu_.analyzePattern(basis);
  lu_.factorize(basis);
  if (lu_.info() != Eigen::Success) {
    throw NumericalFailure("simplex basis is singular after " + std::to_string(iterations_) +
                           " iterations: " + lu_.lastErrorMessage());
  }
  etas_.clear();
}

Eigen::VectorXd Simplex::ftran(const Eigen::VectorXd& rhs) const {
  Eigen::VectorXd y = lu_.solve(rhs);
  for (const auto& e : etas_) {
    const double yp = y[e.pos] / e.pivot;
    if (yp != 0.0) {
      for (size_t k = 0; k < e.idx.size(); ++k) y[e.idx[k]] -= e.val[k] * yp;
    }
    y[e.pos] = yp;
  }
  return y;
}

Eigen::VectorXd Simplex::btran(const Eigen::VectorXd& rhs) const {
  Eigen::VectorXd c = rhs;
  for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
    double s = c[it->pos];
    for (size_t k = 0; k < it->idx.size(); ++k) s -= it->val[k] * c[it->idx[k]];
    c[it->pos] = s / it->pivot;
  }
  return lu_.transpose().solve(c);
}

void Simplex::recompute_basics() {
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m_);
  for (int j = 0; j < total(); ++j) {
    if (state_[j] == VarState::Basic || x_[j] == 0.0) continue;
    const double xj = x_[j];
    for_column(j, [&](int i, double v) { rhs[i] -= v * xj; });
  }
  const Eigen::VectorXd xb = ftran(rhs);
  for (int k = 0; k < m_; ++k) x_[head_[k]] = xb[k];
}

double Simplex::infeasibility() const {
  double sum = 0.0;
  for (int k = 0; k < m_; ++k) {
    const int j = head_[k];
    if (below(j)) sum += lo_[j] - x_[j];
    if (above(j)) sum += x_[j] - up_[j];
  }
  return sum;
}

double Simplex::reduced_cost(int j, const Eigen::VectorXd& y, bool phase1) const {
  double d = phase1 ? 0.0 : cost_[j];
  for_column(j, [&](int i, double v) { d -= y[i] * v; });
  return d;
}

int Simplex::price(const Eigen::VectorXd& y, bool phase1, bool bland, int& dir) const {
  int best = -1;
  double best_score = 0.0;
  for (int j = 0; j < total(); ++j) {
    const VarState s = state_[j];
    if (s == VarState::Basic || lo_[j] == up_[j]) continue;
    const double d = reduced_cost(j, y, phase1);
    int cand_dir = 0;
    if (d < -opt_.dual_tol && (s != VarState::AtUpper) && x_[j] < up_[j]) cand_dir = 1;
    if (d > opt_.dual_tol && (s != VarState::AtLower) && x_[j] > lo_[j]) cand_dir = -1;
    if (cand_dir == 0) continue;
    if (bland) {
      dir = cand_dir;
      return j;
    }
    if (std::abs(d) > best_score) {
      best_score = std::abs(d);
      best = j;
      dir = cand_dir;
    }
  }
  return best;
}

Simplex::Step Simplex::ratio_test(int q, int dir, const Eigen::VectorXd& alpha, bool phase1,
                                  bool bland) const {
  // Basic k moves at rate -dir * alpha[k] per unit of theta.
  const double pivot_tol = 1e-9;
  const double tol = opt_.primal_tol;
  const double own = dir > 0 ? up_[q] - x_[q] : x_[q] - lo_[q];

  auto limit = [&](int k, double rate, double slack_tol, bool& to_upper) -> std::optional<double> {
    const int j = head_[k];
    if (rate > 0) {
      if (phase1 && below(j)) {
        to_upper = false;
        return (lo_[j] - x_[j] + slack_tol) / rate;
      }
      if (up_[j] == kInf || (phase1 && above(j))) return std::nullopt;
      to_upper = true;
      return (up_[j] - x_[j] + slack_tol) / rate;
    }
    if (phase1 && above(j)) {
      to_upper = true;
      return (x_[j] - up_[j] + slack_tol) / -rate;
    }
    if (lo_[j] == -kInf || (phase1 && below(j))) return std::nullopt;
    to_upper = false;
    return (x_[j] - lo_[j] + slack_tol) / -rate;
  };

  if (bland) {
    double best = kInf;
    int best_pos = -1;
    bool best_upper = false;
    for (int k = 0; k < m_; ++k) {
      const double rate = -dir * alpha[k];
      if (std::abs(alpha[k]) <= pivot_tol) continue;
      bool to_upper = false;
      const auto r = limit(k, rate, 0.0, to_upper);
      if (!r) continue;
      const double t = std::max(*r, 0.0);
      if (t < best - 1e-12 || (t <= best + 1e-12 && best_pos >= 0 && head_[k] < head_[best_pos])) {
        best = t;
        best_pos = k;
        best_upper = to_upper;
      }
    }
    if (own <= best) return Step{own, -1, own == kInf, false};
    return Step{best, best_pos, false, best_upper};
  }

  // Harris pass 1: the largest step allowed when every bound is relaxed by tol.
  double theta_max = kInf;
  for (int k = 0; k < m_; ++k) {
    if (std::abs(alpha[k]) <= pivot_tol) continue;
    bool to_upper = false;
    const auto r = limit(k, -dir * alpha[k], tol, to_upper);
    if (r) theta_max = std::min(theta_max, *r);
  }
  if (own <= theta_max) return Step{own, -1, own == kInf, false};

  // Pass 2: among rows whose exact ratio fits under theta_max, pivot on the
  // largest |alpha|.
  int best_pos = -1;
  double best_alpha = 0.0;
  double best_theta = 0.0;
  bool best_upper = false;
  for (int k = 0; k < m_; ++k) {
    if (std::abs(alpha[k]) <= pivot_tol) continue;
    bool to_upper = false;
    const auto r = limit(k, -dir * alpha[k], 0.0, to_upper);
    if (!r || *r > theta_max) continue;
    if (std::abs(alpha[k]) > best_alpha) {
      best_alpha = std::abs(alpha[k]);
      best_pos = k;
      best_theta = std::max(*r, 0.0);
      best_upper = to_upper;
    }
  }
  if (best_pos < 0) return Step{kInf, -1, true, false};
  return Step{best_theta, best_pos, false, best_upper};
}

void Simplex::pivot(int q, int dir, const Eigen::VectorXd& alpha, const Step& step) {
  const double theta = step.theta;
  if (theta != 0.0) {
    for (int k = 0; k < m_; ++k) {
      if (alpha[k] != 0.0) x_[head_[k]] -= theta * dir * alpha[k];
    }
    x_[q] += theta * dir;
  }
  if (step.leave_pos < 0) {
    // Entering variable reached its own bound.
    if (dir > 0) {
      x_[q] = up_[q];
      state_[q] = VarState::AtUpper;
    } else {
      x_[q] = lo_[q];
      state_[q] = VarState::AtLower;
    }
    return;
  }
  const int p = step.leave_pos;
  const int leaving = head_[p];
  if (step.leave_to_upper) {
    x_[leaving] = up_[leaving];
    state_[leaving] = VarState::AtUpper;
  } else {
    x_[leaving] = lo_[leaving];
    state_[leaving] = VarState::AtLower;
  }
  pos_[leaving] = -1;
  head_[p] = q;
  pos_[q] = p;
  state_[q] = VarState::Basic;

  Eta e;
  e.pos = p;
  e.pivot = alpha[p];
  for (int k = 0; k < m_; ++k) {
    if (k != p && alpha[k] != 0.0) {
      e.idx.push_back(k);
      e.val.push_back(alpha[k]);
    }
  }
  etas_.push_back(std::move(e));
}

// Moves nonbasic variables that sit strictly inside their bounds onto a bound
// or into the basis without changing the objective, so the final point is a
// basic solution whenever the feasible region has a vertex along that line.
void Simplex::push_superbasics() {
  for (int j = 0; j < total(); ++j) {
    if (state_[j] != VarState::Between) continue;
    for (int attempt = 0; attempt < 2; ++attempt) {
      const int dir = (attempt == 0) == (lo_[j] != -kInf) ? -1 : 1;
      Eigen::VectorXd a = Eigen::VectorXd::Zero(m_);
      for_column(j, [&](int i, double v) { a[i] = v; });
      const Eigen::VectorXd alpha = ftran(a);
      const Step step = ratio_test(j, dir, alpha, false, false);
      if (step.unbounded) continue;
      pivot(j, dir, alpha, step);
      ++iterations_;
      if (static_cast<int>(etas_.size()) >= opt_.refactor_interval) {
        refactor();
        recompute_basics();
      }
      break;
    }
  }
}

LpSolution Simplex::run() {
  LpSolution sol;
  if (m_ == 0) {
    for (int j = 0; j < n_; ++j) {
      if (cost_[j] > 0) {
        if (lo_[j] == -kInf) {
          sol.status = Status::Unbounded;
          return sol;
        }
        x_[j] = lo_[j];
      } else if (cost_[j] < 0) {
        if (up_[j] == kInf) {
          sol.status = Status::Unbounded;
          return sol;
        }
        x_[j] = up_[j];
      }
    }
  } else {
    refactor();
    recompute_basics();
    int degenerate_run = 0;
    while (true) {
      if (iterations_ >= opt_.max_iterations) {
        throw SolverFailure("simplex iteration limit reached (" + std::to_string(iterations_) + ")");
      }
      const bool phase1 = infeasibility() > 0.0;
      Eigen::VectorXd cb(m_);
      for (int k = 0; k < m_; ++k) {
        const int j = head_[k];
        if (phase1) {
          cb[k] = below(j) ? -1.0 : (above(j) ? 1.0 : 0.0);
        } else {
          cb[k] = cost_[j];
        }
      }
      const Eigen::VectorXd y = btran(cb);
      const bool bland = degenerate_run >= opt_.degenerate_switch;
      int dir = 0;
      const int q = price(y, phase1, bland, dir);
      if (q < 0) {
        // Confirm on a fresh factorization before concluding.
        if (!etas_.empty()) {
          refactor();
          recompute_basics();
          continue;
        }
        if (phase1) {
          sol.status = Status::Infeasible;
          sol.iterations = iterations_;
          return sol;
        }
        push_superbasics();
        refactor();
        recompute_basics();
        if (infeasibility() > 0.0) continue;
        break;
      }

      Eigen::VectorXd a = Eigen::VectorXd::Zero(m_);
      for_column(q, [&](int i, double v) { a[i] = v; });
      const Eigen::VectorXd alpha = ftran(a);
      const Step step = ratio_test(q, dir, alpha, phase1, bland);
      if (step.unbounded) {
        if (phase1) {
          throw NumericalFailure("phase 1 ray without a blocking variable");
        }
        sol.status = Status::Unbounded;
        sol.iterations = iterations_;
        return sol;
      }
      if (step.leave_pos >= 0 && std::abs(alpha[step.leave_pos]) < 1e-11) {
        if (etas_.empty()) {
          std::ostringstream msg;
          msg << "pivot element " << alpha[step.leave_pos] << " too small at iteration "
              << iterations_;
          throw NumericalFailure(msg.str());
        }
        refactor();
        recompute_basics();
        continue;
      }
      pivot(q, dir, alpha, step);
      ++iterations_;
      degenerate_run = step.theta <= 1e-12 ? degenerate_run + 1 : 0;
      if (static_cast<int>(etas_.size()) >= opt_.refactor_interval) {
        refactor();
        recompute_basics();
      }
    }
  }

  sol.status = Status::Optimal;
  sol.values.assign(x_.begin(), x_.begin() + n_);
  sol.objective = 0.0;
  for (int j = 0; j < n_; ++j) sol.objective += cost_[j] * sol.values[j];
  sol.iterations = iterations_;
  const double viol = max_constraint_violation(model_, sol.values);
  if (viol > kFeasibilityTol) {
    std::ostringstream msg;
    msg << "simplex returned a point violating the model by " << viol;
    throw NumericalFailure(msg.str());
  }
  return sol;
}

}  // namespace

LpSolution solve_lp(const LpModel& model, const SolverOptions& options) {
  Simplex simplex(model, options);
  return simplex.run();
}

}  // namespace gamemod::lp
