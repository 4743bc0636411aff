#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <initializer_list>
#include <numeric>
#include <random>
#include <vector>

#include "gamemod/types.hpp"

namespace gamemod::testutil {

inline Eigen::MatrixXd mat(std::initializer_list<std::initializer_list<double>> rows) {
  Eigen::MatrixXd m(rows.size(), rows.begin()->size());
  int i = 0;
  for (const auto& row : rows) {
    int j = 0;
    for (double x : row) m(i, j++) = x;
    ++i;
  }
  return m;
}

inline Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(xs.size());
  int i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

inline Eigen::MatrixXd random_matrix(std::mt19937_64& rng, int m, int n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd r(m, n);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) r(i, j) = u(rng);
  }
  return r;
}

// Dirichlet(1, ..., 1) on k random coordinates of a length-n vector; weights
// are kept at least 0.02 so supports stay well conditioned.
inline Eigen::VectorXd random_distribution(std::mt19937_64& rng, int n, int k) {
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), rng);
  std::exponential_distribution<double> e(1.0);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  for (int a = 0; a < k; ++a) v[idx[a]] = 0.05 + e(rng);
  return v / v.sum();
}

inline StrategyProfile random_profile(std::mt19937_64& rng, int m, int n, int k) {
  return StrategyProfile(random_distribution(rng, m, k), random_distribution(rng, n, k));
}

}  // namespace gamemod::testutil
