#include "gamemod/uniqueness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "gamemod/errors.hpp"
#include "gamemod/lp.hpp"

namespace gamemod {

namespace {

void check_shape(const Eigen::MatrixXd& payoff, const StrategyProfile& profile) {
  if (payoff.rows() != profile.rows() || payoff.cols() != profile.cols()) {
    throw ShapeError("profile dimensions " + std::to_string(profile.rows()) + "x" +
                     std::to_string(profile.cols()) + " do not match payoff " +
                     std::to_string(payoff.rows()) + "x" + std::to_string(payoff.cols()));
  }
}

bool contains(const IndexSet& set, int i) { return std::binary_search(set.begin(), set.end(), i); }

}  // namespace

bool UniquenessCertificate::valid() const {
  return row_sii_residual <= sii_tol && col_sii_residual <= sii_tol && min_sow_gap() > sii_tol &&
         supports_equal && sigma_min > inv_tol;
}

double UniquenessCertificate::min_sow_gap() const {
  double g = std::numeric_limits<double>::infinity();
  if (row_sow_gap) g = std::min(g, *row_sow_gap);
  if (col_sow_gap) g = std::min(g, *col_sow_gap);
  return g;
}

SiisowReport check_siisow(const Eigen::MatrixXd& payoff, const StrategyProfile& profile) {
  check_shape(payoff, profile);
  SiisowReport out;
  const Eigen::VectorXd rq = payoff * profile.q();
  const Eigen::VectorXd pr = payoff.transpose() * profile.p();
  const double v = profile.p().dot(rq);
  out.game_value = v;
  const auto& rows = profile.row_support();
  const auto& cols = profile.col_support();
  for (int i = 0; i < profile.rows(); ++i) {
    if (contains(rows, i)) {
      out.row_sii_residual = std::max(out.row_sii_residual, std::abs(rq[i] - v));
    } else {
      const double gap = v - rq[i];
      out.row_sow_gap = out.row_sow_gap ? std::min(*out.row_sow_gap, gap) : gap;
    }
  }
  for (int j = 0; j < profile.cols(); ++j) {
    if (contains(cols, j)) {
      out.col_sii_residual = std::max(out.col_sii_residual, std::abs(pr[j] - v));
    } else {
      const double gap = pr[j] - v;
      out.col_sow_gap = out.col_sow_gap ? std::min(*out.col_sow_gap, gap) : gap;
    }
  }
  return out;
}

SiisowReport check_siisow(const MatrixGame& game, const StrategyProfile& profile) {
  return check_siisow(game.payoff(), profile);
}

Eigen::MatrixXd bordered_support_matrix(const Eigen::MatrixXd& payoff, const StrategyProfile& profile) {
  check_shape(payoff, profile);
  const auto& rows = profile.row_support();
  const auto& cols = profile.col_support();
  const int ki = static_cast<int>(rows.size());
  const int kj = static_cast<int>(cols.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(ki + 1, kj + 1);
  for (int a = 0; a < ki; ++a) {
    for (int b = 0; b < kj; ++b) m(a, b) = payoff(rows[a], cols[b]);
    m(a, kj) = -1.0;
  }
  for (int b = 0; b < kj; ++b) m(ki, b) = 1.0;
  return m;
}

InvReport check_inv(const Eigen::MatrixXd& payoff, const StrategyProfile& profile) {
  check_shape(payoff, profile);
  InvReport out;
  out.supports_equal = profile.supports_equal();
  if (!out.supports_equal) return out;
  const Eigen::MatrixXd m = bordered_support_matrix(payoff, profile);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  out.sigma_min = svd.singularValues().minCoeff();
  return out;
}

InvReport check_inv(const MatrixGame& game, const StrategyProfile& profile) {
  return check_inv(game.payoff(), profile);
}

UniquenessCertificate verify_unique_ne(const Eigen::MatrixXd& payoff, const StrategyProfile& profile,
                                       double sii_tol, double inv_tol) {
  const SiisowReport s = check_siisow(payoff, profile);
  const InvReport inv = check_inv(payoff, profile);
  UniquenessCertificate c;
  c.game_value = s.game_value;
  c.row_sii_residual = s.row_sii_residual;
  c.col_sii_residual = s.col_sii_residual;
  c.row_sow_gap = s.row_sow_gap;
  c.col_sow_gap = s.col_sow_gap;
  c.sigma_min = inv.sigma_min;
  c.supports_equal = inv.supports_equal;
  c.sii_tol = sii_tol;
  c.inv_tol = inv_tol;
  return c;
}

UniquenessCertificate verify_unique_ne(const MatrixGame& game, const StrategyProfile& profile,
                                       double sii_tol, double inv_tol) {
  return verify_unique_ne(game.payoff(), profile, sii_tol, inv_tol);
}

ZeroSumSolution solve_zero_sum(const Eigen::MatrixXd& payoff) {
  if (payoff.size() == 0 || !payoff.allFinite()) {
    throw InvalidGame("zero-sum solve needs a nonempty finite payoff matrix");
  }
  const int m = static_cast<int>(payoff.rows());
  const int n = static_cast<int>(payoff.cols());
  using lp::Relation;

  // Row player: max v s.t. p^T R e_j >= v, p in the simplex.
  lp::LpModel primal;
  std::vector<int> p(m);
  for (int i = 0; i < m; ++i) p[i] = primal.add_variable("p" + std::to_string(i));
  const int vp = primal.add_variable("v", -lp::kInf, lp::kInf);
  for (int j = 0; j < n; ++j) {
    lp::LinearExpr e;
    for (int i = 0; i < m; ++i) e.push_back({p[i], payoff(i, j)});
    e.push_back({vp, -1.0});
    primal.add_constraint(std::move(e), Relation::GreaterEqual, 0.0);
  }
  lp::LinearExpr sum_p;
  for (int i = 0; i < m; ++i) sum_p.push_back({p[i], 1.0});
  primal.add_constraint(std::move(sum_p), Relation::Equal, 1.0);
  primal.add_objective(vp, -1.0);

  // Column player: min w s.t. e_i^T R q <= w, q in the simplex.
  lp::LpModel dual;
  std::vector<int> q(n);
  for (int j = 0; j < n; ++j) q[j] = dual.add_variable("q" + std::to_string(j));
  const int wq = dual.add_variable("w", -lp::kInf, lp::kInf);
  for (int i = 0; i < m; ++i) {
    lp::LinearExpr e;
    for (int j = 0; j < n; ++j) e.push_back({q[j], payoff(i, j)});
    e.push_back({wq, -1.0});
    dual.add_constraint(std::move(e), Relation::LessEqual, 0.0);
  }
  lp::LinearExpr sum_q;
  for (int j = 0; j < n; ++j) sum_q.push_back({q[j], 1.0});
  dual.add_constraint(std::move(sum_q), Relation::Equal, 1.0);
  dual.add_objective(wq, 1.0);

  const auto ps = lp::solve_lp(primal);
  const auto ds = lp::solve_lp(dual);
  if (ps.status != lp::Status::Optimal || ds.status != lp::Status::Optimal) {
    throw SolverFailure(std::string("zero-sum LP not optimal: primal ") + lp::to_string(ps.status) +
                        ", dual " + lp::to_string(ds.status));
  }
  const double scale = std::max(1.0, payoff.cwiseAbs().maxCoeff());
  if (std::abs(ps.values[vp] - ds.values[wq]) > 1e-7 * scale) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "maximin value " << ps.values[vp] << " and minimax value " << ds.values[wq] << " disagree";
    throw SolverFailure(msg.str());
  }

  ZeroSumSolution out;
  out.value = 0.5 * (ps.values[vp] + ds.values[wq]);
  out.p.resize(m);
  out.q.resize(n);
  for (int i = 0; i < m; ++i) out.p[i] = std::max(0.0, ps.values[p[i]]);
  for (int j = 0; j < n; ++j) out.q[j] = std::max(0.0, ds.values[q[j]]);
  out.p /= out.p.sum();
  out.q /= out.q.sum();
  return out;
}

ZeroSumSolution solve_zero_sum(const MatrixGame& game) { return solve_zero_sum(game.payoff()); }

}  // namespace gamemod
