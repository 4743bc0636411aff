#include "gamemod/types.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "gamemod/errors.hpp"

namespace gamemod {

namespace {

void check_finite_bounded(const Eigen::MatrixXd& m, const Limit& bound, const std::string& where) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double x = m(i, j);
      if (!std::isfinite(x)) {
        throw InvalidGame(where + ": non-finite entry at (" + std::to_string(i) + ", " +
                          std::to_string(j) + ")");
      }
      if (bound && std::abs(x) > *bound) {
        std::ostringstream msg;
        msg << where << ": entry " << x << " at (" << i << ", " << j << ") outside [-" << *bound
            << ", " << *bound << "]";
        throw InvalidGame(msg.str());
      }
    }
  }
}

void check_bound(const Limit& bound) {
  if (bound && !(std::isfinite(*bound) && *bound > 0.0)) {
    throw InvalidGame("bound must be positive and finite, or unbounded");
  }
}

}  // namespace

IndexSet support(const Eigen::VectorXd& v) {
  IndexSet out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v[i] > kSupportEpsilon) out.push_back(static_cast<int>(i));
  }
  if (out.empty()) throw InvalidStrategy("strategy has empty support");
  return out;
}

Eigen::VectorXd normalize_distribution(const Eigen::VectorXd& v, const char* what) {
  if (v.size() == 0) throw InvalidStrategy(std::string(what) + " is empty");
  Eigen::VectorXd out = v;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    if (!std::isfinite(out[i]) || out[i] < 0.0) {
      throw InvalidStrategy(std::string(what) + " has a negative or non-finite entry");
    }
    if (out[i] <= kSupportEpsilon) out[i] = 0.0;
  }
  const double sum = v.sum();
  if (std::abs(sum - 1.0) > kSimplexSumTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << what << " sums to " << sum << ", not 1";
    throw InvalidStrategy(msg.str());
  }
  const double kept = out.sum();
  if (kept <= 0.0) throw InvalidStrategy(std::string(what) + " has empty support");
  return out / kept;
}

MatrixGame::MatrixGame(Eigen::MatrixXd payoff, Limit bound)
    : payoff_(std::move(payoff)), bound_(bound) {
  if (payoff_.rows() < 1 || payoff_.cols() < 1) throw ShapeError("payoff matrix is empty");
  check_bound(bound_);
  check_finite_bounded(payoff_, bound_, "payoff");
}

StrategyProfile::StrategyProfile(Eigen::VectorXd p, Eigen::VectorXd q)
    : p_(normalize_distribution(p, "p")),
      q_(normalize_distribution(q, "q")),
      row_support_(support(p_)),
      col_support_(support(q_)) {}

double expected_payoff(const Eigen::MatrixXd& payoff, const StrategyProfile& profile) {
  if (payoff.rows() != profile.rows() || payoff.cols() != profile.cols()) {
    throw ShapeError("profile dimensions " + std::to_string(profile.rows()) + "x" +
                     std::to_string(profile.cols()) + " do not match payoff " +
                     std::to_string(payoff.rows()) + "x" + std::to_string(payoff.cols()));
  }
  return profile.p().dot(payoff * profile.q());
}

double expected_payoff(const MatrixGame& game, const StrategyProfile& profile) {
  return expected_payoff(game.payoff(), profile);
}

MarkovGame::MarkovGame(int num_states, int horizon, int actions1, int actions2,
                       std::vector<std::vector<Eigen::MatrixXd>> rewards,
                       std::vector<std::vector<std::vector<Eigen::MatrixXd>>> transitions,
                       Eigen::VectorXd initial, Limit bound)
    : num_states_(num_states),
      horizon_(horizon),
      actions1_(actions1),
      actions2_(actions2),
      rewards_(std::move(rewards)),
      transitions_(std::move(transitions)),
      bound_(bound) {
  if (num_states_ < 1 || horizon_ < 1 || actions1_ < 1 || actions2_ < 1) {
    throw ShapeError("Markov game dimensions must be positive");
  }
  check_bound(bound_);
  if (static_cast<int>(rewards_.size()) != horizon_) {
    throw ShapeError("rewards must have H = " + std::to_string(horizon_) + " periods");
  }
  for (int h = 0; h < horizon_; ++h) {
    if (static_cast<int>(rewards_[h].size()) != num_states_) {
      throw ShapeError("rewards period " + std::to_string(h) + " has wrong state count");
    }
    for (int s = 0; s < num_states_; ++s) {
      const auto& r = rewards_[h][s];
      if (r.rows() != actions1_ || r.cols() != actions2_) {
        throw ShapeError("reward matrix (" + std::to_string(h) + ", " + std::to_string(s) +
                         ") has wrong shape");
      }
      check_finite_bounded(r, bound_, "reward (" + std::to_string(h) + ", " + std::to_string(s) + ")");
    }
  }

  const int needed = horizon_ - 1;
  const int given = static_cast<int>(transitions_.size());
  if (given != needed && given != horizon_) {
    throw ShapeError("transitions must have H - 1 or H periods, got " + std::to_string(given));
  }
  transitions_.resize(needed);
  for (int h = 0; h < needed; ++h) {
    if (static_cast<int>(transitions_[h].size()) != num_states_) {
      throw ShapeError("transitions period " + std::to_string(h) + " has wrong state count");
    }
    for (int s = 0; s < num_states_; ++s) {
      auto& next = transitions_[h][s];
      if (static_cast<int>(next.size()) != num_states_) {
        throw ShapeError("transition (" + std::to_string(h) + ", " + std::to_string(s) +
                         ") has wrong successor count");
      }
      Eigen::MatrixXd total = Eigen::MatrixXd::Zero(actions1_, actions2_);
      for (auto& m : next) {
        if (m.rows() != actions1_ || m.cols() != actions2_) {
          throw ShapeError("transition matrix has wrong shape");
        }
        if (!m.allFinite() || m.minCoeff() < 0.0) {
          throw InvalidGame("transition probabilities must be finite and nonnegative");
        }
        total += m;
      }
      if ((total.array() - 1.0).abs().maxCoeff() > kSimplexSumTolerance) {
        throw InvalidGame("transition (" + std::to_string(h) + ", " + std::to_string(s) +
                          ") does not sum to 1");
      }
      for (auto& m : next) m = m.cwiseQuotient(total);
    }
  }

  if (initial.size() != num_states_) throw ShapeError("initial distribution has wrong length");
  try {
    initial_ = normalize_distribution(initial, "initial");
  } catch (const InvalidStrategy& e) {
    throw InvalidGame(e.what());
  }
}

Eigen::MatrixXd MarkovGame::continuation(int h, int s, const Eigen::VectorXd& next_values) const {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(actions1_, actions2_);
  if (h >= horizon_ - 1) return out;
  for (int n = 0; n < num_states_; ++n) out += next_values[n] * transitions_[h][s][n];
  return out;
}

MarkovGame MarkovGame::with_rewards(std::vector<std::vector<Eigen::MatrixXd>> rewards) const {
  return MarkovGame(num_states_, horizon_, actions1_, actions2_, std::move(rewards), transitions_,
                    initial_, std::nullopt);
}

MarkovPolicy::MarkovPolicy(std::vector<std::vector<StrategyProfile>> stages)
    : stages_(std::move(stages)) {
  if (stages_.empty() || stages_.front().empty()) throw ShapeError("policy is empty");
  for (const auto& row : stages_) {
    if (row.size() != stages_.front().size()) throw ShapeError("policy has ragged state count");
  }
}

void MarkovPolicy::check_shape(const MarkovGame& game) const {
  if (horizon() != game.horizon() || num_states() != game.num_states()) {
    throw ShapeError("policy covers " + std::to_string(horizon()) + " periods x " +
                     std::to_string(num_states()) + " states, game has " +
                     std::to_string(game.horizon()) + " x " + std::to_string(game.num_states()));
  }
  for (const auto& row : stages_) {
    for (const auto& prof : row) {
      if (prof.rows() != game.actions1() || prof.cols() != game.actions2()) {
        throw ShapeError("policy stage profile has wrong action dimensions");
      }
    }
  }
}

Eigen::MatrixXd cost_weights(const CostSpec& cost, const StrategyProfile& target, int stage) {
  if (std::holds_alternative<OneTimeL1>(cost)) {
    return Eigen::MatrixXd::Ones(target.rows(), target.cols());
  }
  const auto& forever = std::get<ForeverCost>(cost);
  if (forever.weights) {
    if (stage < 0 || stage >= static_cast<int>(forever.weights->size())) {
      throw ShapeError("cost weight override has no entry for stage " + std::to_string(stage));
    }
    const auto& w = (*forever.weights)[stage];
    if (w.rows() != target.rows() || w.cols() != target.cols()) {
      throw ShapeError("cost weight override has wrong shape");
    }
    return w;
  }
  return target.p() * target.q().transpose();
}

void validate_cost(const CostSpec& cost) {
  if (const auto* f = std::get_if<ForeverCost>(&cost); f && f->weights) {
    for (const auto& w : *f->weights) {
      if (!w.allFinite() || (w.size() > 0 && w.minCoeff() < 0.0)) {
        throw InvalidCost("cost weights must be finite and nonnegative");
      }
    }
  }
}

bool ValueRange::contains(double v, double tol) const {
  if (lo && v < *lo - tol) return false;
  if (hi && v > *hi + tol) return false;
  return true;
}

void ModificationRequest::validate() const {
  if (value_range.lo && value_range.hi && *value_range.lo > *value_range.hi) {
    throw InvalidRequest("value range has v_lo > v_hi");
  }
  if ((value_range.lo && !std::isfinite(*value_range.lo)) ||
      (value_range.hi && !std::isfinite(*value_range.hi))) {
    throw InvalidRequest("value range endpoints must be finite or unbounded");
  }
  if (!(margin_sow > 0.0) || !std::isfinite(margin_sow)) throw InvalidRequest("iota must be positive");
  if (!(margin_reward > 0.0) || !std::isfinite(margin_reward)) {
    throw InvalidRequest("lambda must be positive");
  }
  if (bound && !(*bound > 0.0 && std::isfinite(*bound))) {
    throw InvalidRequest("bound must be positive");
  }
  validate_cost(cost);
}

}  // namespace gamemod
