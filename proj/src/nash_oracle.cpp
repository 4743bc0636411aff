#include <algorithm>
#include <cmath>
#include <functional>

#include "gamemod/errors.hpp"
#include "gamemod/uniqueness.hpp"

namespace gamemod {

namespace {

constexpr double kDistinctTol = 1e-7;

void add_distinct(std::vector<Eigen::VectorXd>& list, const Eigen::VectorXd& v) {
  for (const auto& w : list) {
    if ((w - v).cwiseAbs().maxCoeff() <= kDistinctTol) return;
  }
  list.push_back(v);
}

// Solves [[M, -1], [1^T, 0]] [x; v] = [0; 1] and scatters x onto `support`.
bool solve_bordered(const Eigen::MatrixXd& block, const std::vector<int>& support, int dim,
                    Eigen::VectorXd& x, double& v) {
  const int k = static_cast<int>(block.rows());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(k + 1, k + 1);
  m.topLeftCorner(k, k) = block;
  m.topRightCorner(k, 1).setConstant(-1.0);
  m.bottomLeftCorner(1, k).setConstant(1.0);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  lu.setThreshold(1e-10);
  if (!lu.isInvertible()) return false;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k + 1);
  rhs[k] = 1.0;
  const Eigen::VectorXd sol = lu.solve(rhs);
  x = Eigen::VectorXd::Zero(dim);
  for (int a = 0; a < k; ++a) x[support[a]] = sol[a];
  v = sol[k];
  return true;
}

void for_each_subset(int n, int k, const std::function<void(const std::vector<int>&)>& f) {
  std::vector<int> idx(k);
  for (int a = 0; a < k; ++a) idx[a] = a;
  while (true) {
    f(idx);
    int a = k - 1;
    while (a >= 0 && idx[a] == n - k + a) --a;
    if (a < 0) return;
    ++idx[a];
    for (int b = a + 1; b < k; ++b) idx[b] = idx[b - 1] + 1;
  }
}

}  // namespace

std::vector<NashEquilibrium> NashEnumeration::equilibria() const {
  std::vector<NashEquilibrium> out;
  for (const auto& p : row_strategies) {
    for (const auto& q : col_strategies) out.push_back({p, q, value});
  }
  return out;
}

bool NashEnumeration::unique_equals(const StrategyProfile& profile, double tol) const {
  if (!unique()) return false;
  return (row_strategies[0] - profile.p()).cwiseAbs().maxCoeff() <= tol &&
         (col_strategies[0] - profile.q()).cwiseAbs().maxCoeff() <= tol;
}

NashEnumeration enumerate_nash(const Eigen::MatrixXd& payoff, int max_dim) {
  const int m = static_cast<int>(payoff.rows());
  const int n = static_cast<int>(payoff.cols());
  if (m > max_dim || n > max_dim) {
    throw DimensionTooLarge("equilibrium enumeration limited to " + std::to_string(max_dim) +
                            " actions per player, game is " + std::to_string(m) + "x" +
                            std::to_string(n));
  }
  if (m == 0 || n == 0 || !payoff.allFinite()) throw InvalidGame("payoff must be nonempty and finite");
  const double tol = 1e-9 * std::max(1.0, payoff.cwiseAbs().maxCoeff());

  NashEnumeration out;
  bool have_value = false;
  for (int k = 1; k <= std::min(m, n); ++k) {
    for_each_subset(m, k, [&](const std::vector<int>& rows) {
      for_each_subset(n, k, [&](const std::vector<int>& cols) {
        Eigen::MatrixXd block(k, k);
        for (int a = 0; a < k; ++a) {
          for (int b = 0; b < k; ++b) block(a, b) = payoff(rows[a], cols[b]);
        }
        Eigen::VectorXd q;
        Eigen::VectorXd p;
        double vq = 0.0;
        double vp = 0.0;
        if (!solve_bordered(block, cols, n, q, vq)) return;
        if (!solve_bordered(block.transpose(), rows, m, p, vp)) return;
        if (q.minCoeff() < -tol || p.minCoeff() < -tol) return;
        q = q.cwiseMax(0.0);
        p = p.cwiseMax(0.0);
        q /= q.sum();
        p /= p.sum();
        // No profitable unilateral deviation for either player.
        const double v = p.dot(payoff * q);
        if ((payoff * q).maxCoeff() > v + tol) return;
        if ((payoff.transpose() * p).minCoeff() < v - tol) return;
        if (!have_value) {
          out.value = v;
          have_value = true;
        }
        add_distinct(out.row_strategies, p);
        add_distinct(out.col_strategies, q);
      });
    });
  }
  if (!have_value) {
    throw SolverFailure("equilibrium enumeration found no equilibrium (numerical breakdown)");
  }
  return out;
}

NashEnumeration enumerate_nash(const MatrixGame& game, int max_dim) {
  return enumerate_nash(game.payoff(), max_dim);
}

}  // namespace gamemod
