#pragma once

#include <Eigen/Dense>

#include <vector>

#include "gamemod/lp.hpp"
#include "gamemod/rap.hpp"
#include "gamemod/result.hpp"
#include "gamemod/types.hpp"
#include "gamemod/uniqueness.hpp"

namespace gamemod {

// Q-matrices and stage values from backward induction; v after the last
// period is zero.
struct StageDecomposition {
  std::vector<std::vector<Eigen::MatrixXd>> q;  // [h][s]
  std::vector<Eigen::VectorXd> values;          // [h], indexed by state
  double initial_value = 0.0;                   // sum_s P_0(s) v_0(s)
};

// Solves every stage game with solve_zero_sum, last period first.
StageDecomposition backward_induction(const MarkovGame& game);

struct MarkovVerification {
  StageDecomposition decomposition;
  std::vector<UniquenessCertificate> certificates;  // (h, s) lexicographic
  double value = 0.0;

  bool valid() const;
  // Stages whose certificate fails, as h * S + s.
  std::vector<int> failing_stages() const;
};

MarkovVerification verify_mpe_unique(const MarkovGame& game, const MarkovPolicy& policy,
                                     double sii_tol = kSiiTolerance,
                                     double inv_tol = kInvTolerance);

// Equal supports at every stage and (-H b, H b) meeting [v_lo, v_hi], plus the
// per-stage margin check against [v_lo / H, v_hi / H].
FeasibilityReport check_feasibility_markov(const ModificationRequest& request, int actions1,
                                           int actions2, int horizon, int num_states);

struct RelaxedMarkovProgram {
  lp::LpModel model;
  std::vector<std::vector<std::vector<std::vector<int>>>> reward_vars;  // [h][s][i][j]
  std::vector<std::vector<std::vector<std::vector<int>>>> q_vars;       // [h][s][i][j]
  std::vector<std::vector<int>> value_vars;                             // [h][s]
};

// Per-stage SII/SOW rows on Q, Bellman rows tying Q to R and the next
// period's values, the value range on sum_s P_0(s) v_0(s), reward bounds
// shrunk by lambda and the cost over every reward entry.
RelaxedMarkovProgram build_relaxed_program_markov(const MarkovGame& original,
                                                  const ModificationRequest& request);

// Relax and perturb for Markov games. Epsilon is drawn per (h, s) in
// lexicographic order from one stream; stages failing verification are
// redrawn from the same stream.
ModificationResult rap_mg(const MarkovGame& original, const ModificationRequest& request);

// Sum of stage-by-stage optima: the last period first, each stage solved as
// a normal-form relaxed program on R0_h(s) + continuation, with the
// continuation built from the values chosen for the following period.
// Ignores the value range; costs are taken from request.cost.
double stagewise_optimum(const MarkovGame& original, const ModificationRequest& request);

}  // namespace gamemod
