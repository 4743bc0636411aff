#include "gamemod/erps.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "gamemod/errors.hpp"

namespace gamemod {

namespace {

std::vector<int> support_first(const IndexSet& support, int dim) {
  std::vector<int> perm(support.begin(), support.end());
  for (int i = 0; i < dim; ++i) {
    if (!std::binary_search(support.begin(), support.end(), i)) perm.push_back(i);
  }
  return perm;
}

}  // namespace

ErpsGame build_erps(const StrategyProfile& profile) {
  const auto& rows = profile.row_support();
  const auto& cols = profile.col_support();
  if (rows.size() != cols.size()) {
    throw UnequalSupports("target supports have sizes " + std::to_string(rows.size()) + " and " +
                          std::to_string(cols.size()) + "; a unique equilibrium needs them equal");
  }
  const int k = static_cast<int>(rows.size());
  const int m = profile.rows();
  const int n = profile.cols();

  ErpsGame out;
  out.k = k;
  out.row_perm = support_first(rows, m);
  out.col_perm = support_first(cols, n);

  // Support probabilities in relabeled order.
  Eigen::VectorXd p(k);
  Eigen::VectorXd q(k);
  for (int a = 0; a < k; ++a) {
    p[a] = profile.p()[rows[a]];
    q[a] = profile.q()[cols[a]];
  }
  const double min_prob = std::min(p.minCoeff(), q.minCoeff());
  if (min_prob < kErpsConditioningWarning) {
    std::ostringstream msg;
    msg << "minimum support probability " << min_prob
        << " is tiny; the eRPS block is badly conditioned";
    out.warnings.push_back(msg.str());
  }

  double c = 1.0;
  if (k > 1) {
    c = std::numeric_limits<double>::infinity();
    for (int i = 0; i < k; ++i) {
      c = std::min({c, p[i] * q[(i + 1) % k], p[i] * q[(i + 2) % k]});
    }
  }
  out.normalizer_c = c;

  Eigen::MatrixXd rel = Eigen::MatrixXd::Zero(m, n);
  if (k > 1) {
    for (int i = 0; i < k; ++i) {
      const int lose = (i + 1) % k;
      const int win = (i + 2) % k;
      rel(i, lose) = -c / (p[i] * q[lose]);
      rel(i, win) = c / (p[i] * q[win]);
    }
  }
  rel.topRightCorner(k, n - k).setConstant(1.0);
  rel.bottomLeftCorner(m - k, k).setConstant(-1.0);

  out.matrix.resize(m, n);
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < n; ++b) out.matrix(out.row_perm[a], out.col_perm[b]) = rel(a, b);
  }
  return out;
}

}  // namespace gamemod
