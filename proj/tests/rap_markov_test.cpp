#include <gtest/gtest.h>

#include <random>

#include "gamemod/erps.hpp"
#include "gamemod/errors.hpp"
#include "gamemod/generate.hpp"
#include "gamemod/markov.hpp"
#include "gamemod/rap.hpp"
#include "test_util.hpp"

namespace gamemod {
namespace {

using testutil::mat;
using testutil::vec;

using Rewards = std::vector<std::vector<Eigen::MatrixXd>>;
using Transitions = std::vector<std::vector<std::vector<Eigen::MatrixXd>>>;

// Transitions that ignore the actions: P(s' | s) = row s of `kernel`.
Transitions action_free(const Eigen::MatrixXd& kernel, int horizon, int a1, int a2) {
  const int states = static_cast<int>(kernel.rows());
  Transitions t(horizon - 1, std::vector<std::vector<Eigen::MatrixXd>>(states));
  for (auto& stage : t) {
    for (int s = 0; s < states; ++s) {
      for (int n = 0; n < states; ++n) stage[s].push_back(Eigen::MatrixXd::Constant(a1, a2, kernel(s, n)));
    }
  }
  return t;
}

MarkovPolicy constant_policy(const StrategyProfile& prof, int horizon, int states) {
  return MarkovPolicy(std::vector<std::vector<StrategyProfile>>(horizon, std::vector<StrategyProfile>(states, prof)));
}

ModificationRequest markov_request(const MarkovPolicy& policy, ValueRange range = {},
                                   Limit bound = std::nullopt) {
  return ModificationRequest{policy, range, bound};
}

const StrategyProfile kUniform3(Eigen::VectorXd::Constant(3, 1.0 / 3), Eigen::VectorXd::Constant(3, 1.0 / 3));
const Eigen::MatrixXd kRps = mat({{0, -1, 1}, {1, 0, -1}, {-1, 1, 0}});

TEST(BackwardInduction, HorizonOneIsTheStageGames) {
  const Rewards r{{mat({{0, 1}, {1, 0}}), mat({{2, -3}, {-3, 4}})}};
  const MarkovGame g(2, 1, 2, 2, r, {}, vec({0.25, 0.75}));
  const auto dec = backward_induction(g);
  EXPECT_EQ(dec.q[0][1], r[0][1]);
  EXPECT_NEAR(dec.values[0][0], 0.5, 1e-10);
  EXPECT_NEAR(dec.values[0][1], -1.0 / 12, 1e-10);
  EXPECT_NEAR(dec.initial_value, 0.25 * 0.5 - 0.75 / 12, 1e-10);
}

TEST(BackwardInduction, ValuesAccumulateOverPeriods) {
  // One state; each period is [[0,1],[1,0]] with value 1/2.
  const int horizon = 3;
  const Rewards r(horizon, {mat({{0, 1}, {1, 0}})});
  const MarkovGame g(1, horizon, 2, 2, r, action_free(mat({{1}}), horizon, 2, 2), vec({1}));
  const auto dec = backward_induction(g);
  for (int h = 0; h < horizon; ++h) EXPECT_NEAR(dec.values[h][0], 0.5 * (horizon - h), 1e-10);
  EXPECT_TRUE(dec.q[0][0].isApprox(mat({{1, 2}, {2, 1}}), 1e-10));
}

TEST(BackwardInduction, ZeroRewardsGiveZeroValues) {
  const auto inst = generate_random_markov(3, 2, 4, 9);
  const Rewards zero(4, std::vector<Eigen::MatrixXd>(3, Eigen::MatrixXd::Zero(2, 2)));
  const auto dec = backward_induction(inst.game.with_rewards(zero));
  for (const auto& v : dec.values) EXPECT_LE(v.cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(dec.initial_value, 0.0);
}

TEST(VerifyMpe, HorizonOneRps) {
  const MarkovGame g(1, 1, 3, 3, {{kRps}}, {}, vec({1}));
  const auto ver = verify_mpe_unique(g, constant_policy(kUniform3, 1, 1));
  EXPECT_TRUE(ver.valid());
  EXPECT_NEAR(ver.value, 0.0, 1e-12);
}

TEST(VerifyMpe, ErpsBuiltGameHasLinearStageValues) {
  // R_h(s) = delta * eRPS(p_h(s), q_h(s)) + v* / H with random action-dependent transitions.
  std::mt19937_64 rng(7);
  const int states = 3;
  const int horizon = 5;
  const double v_star = 0.8;
  const double delta = 0.3;
  auto inst = generate_random_markov(states, 3, horizon, 12);
  std::vector<std::vector<StrategyProfile>> stages(horizon);
  Rewards r(horizon);
  for (int h = 0; h < horizon; ++h) {
    for (int s = 0; s < states; ++s) {
      const int k = 1 + static_cast<int>(rng() % 3);
      stages[h].push_back(testutil::random_profile(rng, 3, 3, k));
      r[h].push_back((delta * build_erps(stages[h].back()).matrix).array() + v_star / horizon);
    }
  }
  const MarkovPolicy policy(stages);
  const auto ver = verify_mpe_unique(inst.game.with_rewards(r), policy);
  EXPECT_TRUE(ver.valid());
  for (int h = 0; h < horizon; ++h) {
    for (int s = 0; s < states; ++s) {
      EXPECT_NEAR(ver.decomposition.values[h][s], (horizon - h) * v_star / horizon, 1e-9);
    }
  }
  EXPECT_NEAR(ver.value, v_star, 1e-9);
}

TEST(VerifyMpe, UnequalSupportStageFails) {
  const StrategyProfile bad(vec({0.5, 0.5, 0}), vec({1, 0, 0}));
  std::vector<std::vector<StrategyProfile>> stages{{kUniform3}, {bad}};
  const MarkovGame g(1, 2, 3, 3, {{kRps}, {kRps}}, action_free(mat({{1}}), 2, 3, 3), vec({1}));
  const auto ver = verify_mpe_unique(g, MarkovPolicy(stages));
  EXPECT_FALSE(ver.valid());
  EXPECT_EQ(ver.failing_stages(), std::vector<int>{1});
}

TEST(FeasibilityMarkov, Examples) {
  const auto policy = constant_policy(kUniform3, 4, 2);
  // (-H b, H b) = (-4, 4).
  EXPECT_TRUE(check_feasibility_markov(markov_request(policy, {3.5, 5.0}, 1.0), 3, 3, 4, 2).margin_ok);
  EXPECT_FALSE(check_feasibility_markov(markov_request(policy, {4.0, 5.0}, 1.0), 3, 3, 4, 2).feasible);
  // Per-period range [0.9875, 1.25] misses (-0.98, 0.98).
  const auto rep = check_feasibility_markov(markov_request(policy, {3.95, 5.0}, 1.0), 3, 3, 4, 2);
  EXPECT_TRUE(rep.feasible);
  EXPECT_FALSE(rep.margin_ok);

  std::vector<std::vector<StrategyProfile>> stages(2, std::vector<StrategyProfile>(2, kUniform3));
  stages[1][0] = StrategyProfile(vec({0.5, 0.5, 0}), vec({1, 0, 0}));
  const auto bad = check_feasibility_markov(markov_request(MarkovPolicy(stages)), 3, 3, 2, 2);
  EXPECT_FALSE(bad.feasible);
  ASSERT_EQ(bad.violations.size(), 1u);
  EXPECT_NE(bad.violations[0].find("h1_s0"), std::string::npos);
}

TEST(FeasibilityMarkov, InfeasibleRequestThrows) {
  const auto policy = constant_policy(kUniform3, 2, 1);
  const MarkovGame g(1, 2, 3, 3, {{kRps}, {kRps}}, action_free(mat({{1}}), 2, 3, 3), vec({1}));
  EXPECT_THROW(rap_mg(g, markov_request(policy, {2.5, 3.0}, 1.0)), InfeasibleRequest);
  EXPECT_THROW(rap_mg(g, ModificationRequest{kUniform3, {}, std::nullopt}), InvalidRequest);
}

TEST(RelaxedMarkovProgram, HorizonOneMatchesNormalForm) {
  std::mt19937_64 rng(19);
  for (int t = 0; t < 10; ++t) {
    const Eigen::MatrixXd r0 = testutil::random_matrix(rng, 3, 3);
    const StrategyProfile prof = testutil::random_profile(rng, 3, 3, 1 + static_cast<int>(rng() % 3));
    const ValueRange range{-0.2, 0.3};
    const Limit bound = t % 2 ? Limit(1.0) : std::nullopt;
    const MarkovGame g(1, 1, 3, 3, {{r0}}, {}, vec({1}));
    const auto mprog = build_relaxed_program_markov(g, markov_request(constant_policy(prof, 1, 1), range, bound));
    const auto nprog = build_relaxed_program(MatrixGame(r0), ModificationRequest{prof, range, bound});
    const auto msol = lp::solve_lp(mprog.model);
    const auto nsol = lp::solve_lp(nprog.model);
    ASSERT_EQ(msol.status, lp::Status::Optimal);
    ASSERT_EQ(nsol.status, lp::Status::Optimal);
    EXPECT_NEAR(msol.objective, nsol.objective, 1e-8);

    // The Markov solution is feasible for the normal-form program.
    std::vector<double> x = nsol.values;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) x[nprog.reward_vars[i][j]] = msol.values[mprog.reward_vars[0][0][i][j]];
    }
    x[nprog.value_var] = msol.values[mprog.value_vars[0][0]];
    // Each |.| auxiliary takes the smallest value its two rows allow.
    for (int c = 0; c < nprog.model.num_variables(); ++c) {
      if (nprog.model.variable(c).name.rfind("abs_", 0) == 0) x[c] = 0.0;
    }
    for (const auto& con : nprog.model.constraints()) {
      if (con.expr.size() != 2) continue;
      const bool first = nprog.model.variable(con.expr[0].var).name.rfind("abs_", 0) == 0;
      const auto& aux = con.expr[first ? 0 : 1];
      const auto& other = con.expr[first ? 1 : 0];
      if (nprog.model.variable(aux.var).name.rfind("abs_", 0) != 0) continue;
      x[aux.var] = std::max(x[aux.var], con.rhs - other.coef * x[other.var]);
    }
    EXPECT_LE(lp::max_constraint_violation(nprog.model, x), 1e-8);
  }
}

TEST(RapMg, AlreadyUniqueGameCostsOnlyThePerturbation) {
  const int horizon = 3;
  const Rewards r(horizon, std::vector<Eigen::MatrixXd>(2, kRps));
  const auto transitions = action_free(mat({{0.5, 0.5}, {0.2, 0.8}}), horizon, 3, 3);
  const MarkovGame g(2, horizon, 3, 3, r, transitions, vec({0.5, 0.5}));
  const auto res = rap_mg(g, markov_request(constant_policy(kUniform3, horizon, 2)));
  EXPECT_TRUE(res.certified());
  EXPECT_NEAR(res.relaxed_cost, 0.0, 1e-10);
  EXPECT_LE(res.cost, 6 * 6 * 0.01 + 1e-12);
  EXPECT_NEAR(res.value, 0.0, 1e-9);
}

TEST(RapMg, PerturbationKeepsStageValues) {
  const auto inst = generate_random_markov(3, 3, 4, 5);
  const auto res = rap_mg(inst.game, markov_request(inst.target));
  ASSERT_TRUE(res.certified());
  ASSERT_EQ(res.stage_values.size(), res.lp_stage_values.size());
  for (std::size_t k = 0; k < res.stage_values.size(); ++k) {
    EXPECT_NEAR(res.stage_values[k], res.lp_stage_values[k], 1e-8);
  }
  EXPECT_LE(res.bellman_residual, 1e-8);
}

TEST(RapMg, RandomInstancesAreCertified) {
  std::mt19937_64 rng(99);
  for (int t = 0; t < 50; ++t) {
    const int states = 1 + static_cast<int>(rng() % 4);
    const int actions = 2 + static_cast<int>(rng() % 2);
    const int horizon = 1 + static_cast<int>(rng() % 4);
    const auto inst = generate_random_markov(states, actions, horizon, rng());
    const Limit bound = t % 2 ? Limit(1.0) : std::nullopt;
    const ValueRange range = t % 3 == 0 ? ValueRange{-0.5, 0.5} : ValueRange{};
    ModificationRequest req = markov_request(inst.target, range, bound);
    req.rng_seed = t;
    const auto res = rap_mg(inst.game, req);
    ASSERT_TRUE(res.certified()) << "trial " << t;
    EXPECT_TRUE(range.contains(res.value, 1e-7));
    for (const auto& m : res.modified_rewards) {
      if (bound) EXPECT_LE(m.cwiseAbs().maxCoeff(), *bound);
    }
    EXPECT_LE(res.bellman_residual, 1e-7);

    // Independent check of each stage game against the enumeration oracle.
    Rewards modified(horizon);
    for (int h = 0; h < horizon; ++h) {
      for (int s = 0; s < states; ++s) modified[h].push_back(res.modified_rewards[h * states + s]);
    }
    const auto dec = backward_induction(inst.game.with_rewards(modified));
    for (int h = 0; h < horizon; ++h) {
      for (int s = 0; s < states; ++s) {
        EXPECT_TRUE(enumerate_nash(dec.q[h][s]).unique_equals(inst.target.at(h, s), 1e-6))
            << "trial " << t << " stage " << h << "," << s;
      }
    }
  }
}

TEST(RapMg, SeedDeterminism) {
  const auto inst = generate_random_markov(2, 2, 3, 77);
  ModificationRequest req = markov_request(inst.target);
  req.rng_seed = 1234;
  const auto a = rap_mg(inst.game, req);
  const auto b = rap_mg(inst.game, req);
  ASSERT_EQ(a.modified_rewards.size(), b.modified_rewards.size());
  for (std::size_t k = 0; k < a.modified_rewards.size(); ++k) {
    EXPECT_EQ(a.modified_rewards[k], b.modified_rewards[k]);
  }
  EXPECT_EQ(a.perturbations, b.perturbations);
}

TEST(Stagewise, MatchesJointWhenContinuationIgnoresActions) {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    auto inst = generate_random_markov(seed % 2 ? 1 : 3, 3, 3, seed);
    const MarkovGame game = seed % 2 ? inst.game
                                     : MarkovGame(3, 3, 3, 3, inst.game.rewards(),
                                                  action_free(mat({{0.2, 0.3, 0.5}, {1, 0, 0}, {0.1, 0.1, 0.8}}), 3, 3, 3),
                                                  inst.game.initial());
    const auto req = markov_request(inst.target);
    const auto sol = lp::solve_lp(build_relaxed_program_markov(game, req).model);
    ASSERT_EQ(sol.status, lp::Status::Optimal);
    EXPECT_NEAR(stagewise_optimum(game, req), sol.objective, 1e-6) << "seed " << seed;
  }
}

TEST(Stagewise, NeverBeatsTheJointProgram) {
  // With action-dependent transitions, moving a later value can make earlier
  // stages cheaper, so the greedy sum is only an upper bound.
  int strictly_worse = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto inst = generate_random_markov(3, 2, 3, seed);
    const auto req = markov_request(inst.target);
    const auto sol = lp::solve_lp(build_relaxed_program_markov(inst.game, req).model);
    const double stagewise = stagewise_optimum(inst.game, req);
    EXPECT_GE(stagewise, sol.objective - 1e-8);
    strictly_worse += stagewise > sol.objective + 1e-6;
  }
  EXPECT_GT(strictly_worse, 0);
}

}  // namespace
}  // namespace gamemod
