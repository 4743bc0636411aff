#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "gamemod/types.hpp"

namespace gamemod {

inline constexpr double kSiiTolerance = 1e-7;
inline constexpr double kInvTolerance = 1e-9;

struct SiisowReport {
  double game_value = 0.0;
  double row_sii_residual = 0.0;  // max_{i in I} |e_i^T R q - v|
  double col_sii_residual = 0.0;  // max_{j in J} |p^T R e_j - v|
  // min_{i not in I} (v - e_i^T R q); empty when I covers every row.
  std::optional<double> row_sow_gap;
  // min_{j not in J} (p^T R e_j - v); empty when J covers every column.
  std::optional<double> col_sow_gap;
};

struct InvReport {
  double sigma_min = 0.0;
  bool supports_equal = false;
};

struct UniquenessCertificate {
  double game_value = 0.0;
  double row_sii_residual = 0.0;
  double col_sii_residual = 0.0;
  std::optional<double> row_sow_gap;
  std::optional<double> col_sow_gap;
  double sigma_min = 0.0;
  bool supports_equal = false;
  double sii_tol = kSiiTolerance;
  double inv_tol = kInvTolerance;

  // Residuals within sii_tol, both gaps above sii_tol, equal supports and
  // sigma_min above inv_tol.
  bool valid() const;
  // Smallest SOW gap, +infinity when there are no off-support actions.
  double min_sow_gap() const;
};

SiisowReport check_siisow(const Eigen::MatrixXd& payoff, const StrategyProfile& profile);
SiisowReport check_siisow(const MatrixGame& game, const StrategyProfile& profile);

// Smallest singular value of [[R_IJ, -1], [1^T, 0]]; zero when |I| != |J|.
InvReport check_inv(const Eigen::MatrixXd& payoff, const StrategyProfile& profile);
InvReport check_inv(const MatrixGame& game, const StrategyProfile& profile);

// The bordered support matrix itself (square only when |I| = |J|).
Eigen::MatrixXd bordered_support_matrix(const Eigen::MatrixXd& payoff, const StrategyProfile& profile);

UniquenessCertificate verify_unique_ne(const Eigen::MatrixXd& payoff, const StrategyProfile& profile,
                                       double sii_tol = kSiiTolerance,
                                       double inv_tol = kInvTolerance);
UniquenessCertificate verify_unique_ne(const MatrixGame& game, const StrategyProfile& profile,
                                       double sii_tol = kSiiTolerance,
                                       double inv_tol = kInvTolerance);

struct ZeroSumSolution {
  double value = 0.0;
  Eigen::VectorXd p;  // maximin strategy of the row player
  Eigen::VectorXd q;  // minimax strategy of the column player
};

// Solves the maximin LP for p and the minimax LP for q. Throws SolverFailure
// if either LP is not optimal or their values disagree.
ZeroSumSolution solve_zero_sum(const Eigen::MatrixXd& payoff);
ZeroSumSolution solve_zero_sum(const MatrixGame& game);

struct NashEquilibrium {
  Eigen::VectorXd p;
  Eigen::VectorXd q;
  double value = 0.0;
};

// Extreme optimal strategies of both players. The equilibrium set of a
// zero-sum game is the product of the two optimal-strategy polytopes, so the
// game has a unique NE iff each list holds a single strategy.
struct NashEnumeration {
  std::vector<Eigen::VectorXd> row_strategies;
  std::vector<Eigen::VectorXd> col_strategies;
  double value = 0.0;

  bool unique() const { return row_strategies.size() == 1 && col_strategies.size() == 1; }
  // Every pairing of an extreme row strategy with an extreme column strategy.
  std::vector<NashEquilibrium> equilibria() const;
  // True iff the game has exactly one NE and it equals (p, q) within tol.
  bool unique_equals(const StrategyProfile& profile, double tol = 1e-7) const;
};

inline constexpr int kDefaultOracleMaxDim = 6;

// Enumerates square support pairs (I, J), solves the bordered systems for q
// and p, and keeps solutions that are nonnegative and pass the full
// no-profitable-deviation check. Every extreme optimal strategy arises from
// some nonsingular square subsystem, so unequal-support equilibria are caught
// as well (they surface as several extreme strategies). Throws
// DimensionTooLarge when either dimension exceeds max_dim.
NashEnumeration enumerate_nash(const Eigen::MatrixXd& payoff, int max_dim = kDefaultOracleMaxDim);
NashEnumeration enumerate_nash(const MatrixGame& game, int max_dim = kDefaultOracleMaxDim);

}  // namespace gamemod
