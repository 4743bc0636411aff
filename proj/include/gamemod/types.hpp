#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

namespace gamemod {

// Mixing probabilities at or below this are treated as exactly zero.
inline constexpr double kSupportEpsilon = 1e-12;
// Probability vectors whose sum is off by at most this are renormalized;
// larger deviations are rejected.
inline constexpr double kSimplexSumTolerance = 1e-9;

// A finite limit or, when empty, an unbounded one. Used for the payoff bound b
// and for the endpoints of the target value range.
using Limit = std::optional<double>;

using IndexSet = std::vector<int>;

// Indices with v_i > kSupportEpsilon. Throws InvalidStrategy when empty.
IndexSet support(const Eigen::VectorXd& v);

// Validates a probability vector and returns it with sub-epsilon entries zeroed
// and the sum renormalized to one. `what` names the vector in error messages.
Eigen::VectorXd normalize_distribution(const Eigen::VectorXd& v, const char* what);

// Payoff matrix of a two-player zero-sum game; the row player maximizes.
class MatrixGame {
 public:
  explicit MatrixGame(Eigen::MatrixXd payoff, Limit bound = std::nullopt);

  const Eigen::MatrixXd& payoff() const { return payoff_; }
  const Limit& bound() const { return bound_; }
  int rows() const { return static_cast<int>(payoff_.rows()); }
  int cols() const { return static_cast<int>(payoff_.cols()); }

 private:
  Eigen::MatrixXd payoff_;
  Limit bound_;
};

class StrategyProfile {
 public:
  StrategyProfile(Eigen::VectorXd p, Eigen::VectorXd q);

  const Eigen::VectorXd& p() const { return p_; }
  const Eigen::VectorXd& q() const { return q_; }
  const IndexSet& row_support() const { return row_support_; }
  const IndexSet& col_support() const { return col_support_; }
  int rows() const { return static_cast<int>(p_.size()); }
  int cols() const { return static_cast<int>(q_.size()); }
  bool supports_equal() const { return row_support_.size() == col_support_.size(); }

 private:
  Eigen::VectorXd p_;
  Eigen::VectorXd q_;
  IndexSet row_support_;
  IndexSet col_support_;
};

// p^T R q. Throws ShapeError on mismatched dimensions.
double expected_payoff(const Eigen::MatrixXd& payoff, const StrategyProfile& profile);
double expected_payoff(const MatrixGame& game, const StrategyProfile& profile);

// Finite-horizon zero-sum Markov game. Periods are zero-based here: period h
// in [0, H) is the paper-style period h + 1. Transitions exist for h < H - 1;
// the last period has no successor.
class MarkovGame {
 public:
  // rewards[h][s] is |A1| x |A2|; transitions[h][s][s'] is the |A1| x |A2|
  // matrix of probabilities P_h(s' | s, i, j). `transitions` may hold H or
  // H - 1 periods; a trailing H-th period is ignored.
  MarkovGame(int num_states, int horizon, int actions1, int actions2,
             std::vector<std::vector<Eigen::MatrixXd>> rewards,
             std::vector<std::vector<std::vector<Eigen::MatrixXd>>> transitions,
             Eigen::VectorXd initial, Limit bound = std::nullopt);

  int num_states() const { return num_states_; }
  int horizon() const { return horizon_; }
  int actions1() const { return actions1_; }
  int actions2() const { return actions2_; }
  const Limit& bound() const { return bound_; }
  const Eigen::VectorXd& initial() const { return initial_; }

  const Eigen::MatrixXd& reward(int h, int s) const { return rewards_[h][s]; }
  const Eigen::MatrixXd& transition(int h, int s, int next) const {
    return transitions_[h][s][next];
  }
  const std::vector<std::vector<Eigen::MatrixXd>>& rewards() const { return rewards_; }
  const std::vector<std::vector<std::vector<Eigen::MatrixXd>>>& transitions() const {
    return transitions_;
  }

  // Sum over s' of P_h(s' | s) * next_values[s'], entrywise in (i, j).
  Eigen::MatrixXd continuation(int h, int s, const Eigen::VectorXd& next_values) const;

  // Same transitions and initial distribution, new rewards (unbounded).
  MarkovGame with_rewards(std::vector<std::vector<Eigen::MatrixXd>> rewards) const;

 private:
  int num_states_;
  int horizon_;
  int actions1_;
  int actions2_;
  std::vector<std::vector<Eigen::MatrixXd>> rewards_;
  std::vector<std::vector<std::vector<Eigen::MatrixXd>>> transitions_;
  Eigen::VectorXd initial_;
  Limit bound_;
};

// A stage profile (p_h(s), q_h(s)) for every period and state.
class MarkovPolicy {
 public:
  explicit MarkovPolicy(std::vector<std::vector<StrategyProfile>> stages);

  int horizon() const { return static_cast<int>(stages_.size()); }
  int num_states() const { return static_cast<int>(stages_.front().size()); }
  const StrategyProfile& at(int h, int s) const { return stages_[h][s]; }
  const std::vector<std::vector<StrategyProfile>>& stages() const { return stages_; }

  // Throws ShapeError unless the policy covers every (h, s) of `game`.
  void check_shape(const MarkovGame& game) const;

 private:
  std::vector<std::vector<StrategyProfile>> stages_;
};

// Unweighted L1 distance between reward tables.
struct OneTimeL1 {};

// Target-play weighted L1: weight p_i q_j per stage, unless overridden by
// explicit per-stage weight matrices.
struct ForeverCost {
  std::optional<std::vector<Eigen::MatrixXd>> weights;
};

using CostSpec = std::variant<OneTimeL1, ForeverCost>;

// Entrywise weights of `cost` for stage `stage` whose target is `target`.
Eigen::MatrixXd cost_weights(const CostSpec& cost, const StrategyProfile& target, int stage);

// Checks override weights are nonnegative and finite. Throws InvalidCost.
void validate_cost(const CostSpec& cost);

// Closed target interval for the game value; empty endpoints are infinite.
struct ValueRange {
  Limit lo;
  Limit hi;

  bool contains(double v, double tol = 0.0) const;
};

using Target = std::variant<StrategyProfile, MarkovPolicy>;

inline constexpr double kDefaultSowMargin = 0.01;
inline constexpr double kDefaultRewardMargin = 0.01;

struct ModificationRequest {
  Target target;
  ValueRange value_range;
  Limit bound;
  CostSpec cost = OneTimeL1{};
  double margin_sow = kDefaultSowMargin;      // iota
  double margin_reward = kDefaultRewardMargin;  // lambda
  std::uint64_t rng_seed = 0;

  // Throws InvalidRequest on lo > hi, non-positive margins or bound, and
  // InvalidCost on bad weights.
  void validate() const;
};

}  // namespace gamemod
