#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "gamemod/types.hpp"

namespace gamemod {

// Extended rock-paper-scissors game with (p, q) as its unique NE and value 0.
struct ErpsGame {
  Eigen::MatrixXd matrix;
  double normalizer_c = 1.0;
  int k = 0;
  // Relabeled index a corresponds to original action row_perm[a]; supports
  // come first in ascending order, then the remaining actions ascending.
  std::vector<int> row_perm;
  std::vector<int> col_perm;
  std::vector<std::string> warnings;
};

// Support probabilities below this trigger a conditioning warning.
inline constexpr double kErpsConditioningWarning = 1e-6;

// Throws UnequalSupports when |I| != |J|.
ErpsGame build_erps(const StrategyProfile& profile);

}  // namespace gamemod
