#pragma once

#include <string>
#include <vector>

#include "gamemod/lp.hpp"
#include "gamemod/result.hpp"
#include "gamemod/types.hpp"

namespace gamemod {

inline constexpr int kMaxRedraws = 16;

struct FeasibilityReport {
  bool feasible = true;   // a modification with a unique target equilibrium exists
  bool margin_ok = true;  // the relaxed program's margin precondition holds
  std::vector<std::string> violations;
  std::vector<std::string> notes;
};

// Equal supports and (-b, b) meeting [v_lo, v_hi]; also the margin check
// (-b + lambda + iota, b - lambda - iota) against [v_lo, v_hi]. A note is
// added when reading the margin bracket as [-v_lo, v_hi] would flip it.
FeasibilityReport check_feasibility_normal(const ModificationRequest& request, int rows, int cols);

struct RelaxedProgram {
  lp::LpModel model;
  std::vector<std::vector<int>> reward_vars;  // [i][j]
  int value_var = -1;
};

// The relaxed program with SII equalities, SOW rows with margin iota, the
// value range, reward bounds shrunk by lambda (finite b only) and the cost
// encoded through encode_abs_cost. Throws InfeasibleRequest when the
// feasibility pre-check fails.
RelaxedProgram build_relaxed_program(const MatrixGame& original, const ModificationRequest& request);

// Relax and perturb: solve the relaxed program, add epsilon * eRPS with
// epsilon ~ U[-lambda, lambda] from rng_seed, certify, redraw on failure.
// Throws InfeasibleRequest or CertificationFailure.
ModificationResult rap(const MatrixGame& original, const ModificationRequest& request);

// sum_ij w_ij |R_ij - R0_ij| with the cost's weights for `target`.
double modification_cost(const CostSpec& cost, const StrategyProfile& target, int stage,
                         const Eigen::MatrixXd& modified, const Eigen::MatrixXd& original);

}  // namespace gamemod
