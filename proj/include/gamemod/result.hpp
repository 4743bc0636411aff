#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "gamemod/uniqueness.hpp"

namespace gamemod {

struct SolverStats {
  long lp_iterations = 0;
  int lp_rows = 0;
  int lp_columns = 0;
  int redraws = 0;  // perturbation draws beyond the first, summed over stages
  double lp_seconds = 0.0;
  double total_seconds = 0.0;
};

// Output of rap / rap_mg. Reward tables are listed per stage in (h, s)
// lexicographic order; a normal-form result has exactly one stage.
struct ModificationResult {
  std::vector<Eigen::MatrixXd> modified_rewards;
  std::vector<Eigen::MatrixXd> relaxed_rewards;  // LP solution before perturbation
  double value = 0.0;                            // v, or v_0 for Markov games
  std::vector<double> stage_values;              // recomputed by backward induction
  std::vector<double> lp_stage_values;           // the LP's v variables
  // Largest entrywise gap between the backward-induction Q-matrices and
  // R + continuation built from the LP's v variables, and between the two
  // sets of stage values. Zero for normal-form results.
  double bellman_residual = 0.0;
  double cost = 0.0;
  double relaxed_cost = 0.0;
  std::vector<UniquenessCertificate> certificates;
  std::vector<double> perturbations;  // epsilon per stage
  std::vector<std::string> warnings;
  SolverStats stats;

  bool certified() const {
    for (const auto& c : certificates) {
      if (!c.valid()) return false;
    }
    return !certificates.empty();
  }
};

}  // namespace gamemod
