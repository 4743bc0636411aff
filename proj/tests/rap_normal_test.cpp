#include <gtest/gtest.h>

#include <random>

#include "gamemod/erps.hpp"
#include "gamemod/errors.hpp"
#include "gamemod/rap.hpp"
#include "gamemod/uniqueness.hpp"
#include "test_util.hpp"

namespace gamemod {
namespace {

using testutil::mat;
using testutil::vec;

ModificationRequest request_for(const StrategyProfile& target, ValueRange range = {},
                                Limit bound = std::nullopt) {
  ModificationRequest req{target, range, bound};
  return req;
}

StrategyProfile uniform(int k) {
  return StrategyProfile(Eigen::VectorXd::Constant(k, 1.0 / k), Eigen::VectorXd::Constant(k, 1.0 / k));
}

TEST(FeasibilityNormal, UnequalSupports) {
  const auto req = request_for(StrategyProfile(vec({0.5, 0.5, 0}), vec({0.2, 0.3, 0.5})));
  const auto rep = check_feasibility_normal(req, 3, 3);
  EXPECT_FALSE(rep.feasible);
  ASSERT_EQ(rep.violations.size(), 1u);
  EXPECT_NE(rep.violations[0].find("supports"), std::string::npos);
}

TEST(FeasibilityNormal, DisjointValueRange) {
  const auto rep = check_feasibility_normal(request_for(uniform(2), {2.0, 3.0}, 1.0), 2, 2);
  EXPECT_FALSE(rep.feasible);
}

TEST(FeasibilityNormal, UnboundedPayoffsAlwaysFeasible) {
  const auto rep = check_feasibility_normal(request_for(uniform(3), {-50.0, -40.0}), 3, 3);
  EXPECT_TRUE(rep.feasible);
  EXPECT_TRUE(rep.margin_ok);
}

TEST(FeasibilityNormal, ValueEqualToBoundIsExcluded) {
  EXPECT_FALSE(check_feasibility_normal(request_for(uniform(2), {1.0, 1.0}, 1.0), 2, 2).feasible);
  EXPECT_TRUE(check_feasibility_normal(request_for(uniform(2), {0.99, 1.0}, 1.0), 2, 2).feasible);
}

TEST(FeasibilityNormal, MarginPreconditionAndBracketNote) {
  // b = 1, iota = lambda = 0.01: margin interval (-0.98, 0.98).
  auto rep = check_feasibility_normal(request_for(uniform(2), {0.985, 0.99}, 1.0), 2, 2);
  EXPECT_TRUE(rep.feasible);
  EXPECT_FALSE(rep.margin_ok);
  // [-0.985, 0.99] would meet the margin interval, so the readings disagree.
  ASSERT_EQ(rep.notes.size(), 1u);
  rep = check_feasibility_normal(request_for(uniform(2), {0.5, 0.6}, 1.0), 2, 2);
  EXPECT_TRUE(rep.margin_ok);
  EXPECT_TRUE(rep.notes.empty());
}

TEST(RelaxedProgram, SimplifiedMorraMatchesPublishedMatrix) {
  auto req = request_for(StrategyProfile(vec({7.0 / 12, 5.0 / 12}), vec({7.0 / 12, 5.0 / 12})), {0.0, 0.0});
  req.margin_sow = 1e-4;
  req.margin_reward = 1e-4;
  const auto res = rap(MatrixGame(mat({{2, -3}, {-3, 4}})), req);
  EXPECT_LE((res.relaxed_rewards[0] - mat({{2.04, -2.86}, {-2.86, 4}})).cwiseAbs().maxCoeff(), 0.05);
  EXPECT_TRUE(res.certified());
  EXPECT_NEAR(res.value, 0.0, 1e-9);
}

TEST(RelaxedProgram, AlreadyUniqueTargetCostsNothing) {
  const Eigen::MatrixXd rps = mat({{0, -1, 1}, {1, 0, -1}, {-1, 1, 0}});
  const auto prog = build_relaxed_program(MatrixGame(rps), request_for(uniform(3)));
  const auto sol = lp::solve_lp(prog.model);
  ASSERT_EQ(sol.status, lp::Status::Optimal);
  EXPECT_NEAR(sol.objective, 0.0, 1e-12);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(sol.values[prog.reward_vars[i][j]], rps(i, j), 1e-12);
  }
}

TEST(RelaxedProgram, PureTargetForeverCostIsFree) {
  std::mt19937_64 rng(2);
  const Eigen::MatrixXd r0 = testutil::random_matrix(rng, 4, 3);
  auto req = request_for(StrategyProfile(vec({0, 1, 0, 0}), vec({0, 0, 1})));
  req.cost = ForeverCost{};
  const auto res = rap(MatrixGame(r0), req);
  EXPECT_NEAR(res.relaxed_cost, 0.0, 1e-12);
  EXPECT_NEAR(res.cost, 0.0, 1e-12);
  EXPECT_EQ(res.modified_rewards[0](1, 2), r0(1, 2));
  EXPECT_TRUE(res.certified());
}

TEST(RelaxedProgram, UnequalSupportsRejected) {
  const auto req = request_for(StrategyProfile(vec({0.5, 0.5}), vec({1, 0})));
  EXPECT_THROW(build_relaxed_program(MatrixGame(mat({{1, 2}, {3, 4}})), req), InfeasibleRequest);
}

TEST(Rap, BottledWater) {
  const auto res =
      rap(MatrixGame(mat({{0, 1}, {1, 0}})), request_for(StrategyProfile(vec({0, 1}), vec({0, 1}))));
  EXPECT_NEAR(res.relaxed_rewards[0](0, 1), -0.01, 1e-9);
  EXPECT_NEAR(res.relaxed_cost, 1.01, 1e-9);
  EXPECT_NEAR(res.cost, 1.01, 0.02);
  EXPECT_TRUE(res.certified());
}

TEST(Rap, RockPaperScissorsFireWaterOnlyTouchesFireWater) {
  const Eigen::MatrixXd r0 = mat({{0, -1, 1, -1, 1},
                                  {1, 0, -1, -1, 1},
                                  {-1, 1, 0, -1, 1},
                                  {1, 1, 1, 0, -1},
                                  {-1, -1, -1, 1, 0}});
  const auto res = rap(MatrixGame(r0), request_for(uniform(5)));
  EXPECT_NEAR(res.relaxed_cost, 4.0, 1e-9);
  const Eigen::MatrixXd diff = res.relaxed_rewards[0] - r0;
  EXPECT_NEAR(diff.topRows(3).cwiseAbs().maxCoeff(), 0.0, 1e-9);
  EXPECT_NEAR(diff.leftCols(3).cwiseAbs().maxCoeff(), 0.0, 1e-9);
  EXPECT_NEAR(std::abs(res.relaxed_rewards[0](3, 4)), 3.0, 1e-9);
  EXPECT_NEAR(std::abs(res.relaxed_rewards[0](4, 3)), 3.0, 1e-9);
  EXPECT_TRUE(res.certified());
}

TEST(Rap, ClassicMorraValueIsATieBreak) {
  // Uniform targets reach cost 4 with value +0.25 or -0.25; pinning the
  // published value keeps the optimum at 4.
  const Eigen::MatrixXd tfm = mat({{0, 2, -3, 0}, {-2, 0, 0, 3}, {3, 0, 0, -4}, {0, -3, 4, 0}});
  const auto free = rap(MatrixGame(tfm), request_for(uniform(4)));
  const auto pinned = rap(MatrixGame(tfm), request_for(uniform(4), {-0.25, -0.25}));
  EXPECT_NEAR(free.relaxed_cost, 4.0, 1e-9);
  EXPECT_NEAR(pinned.relaxed_cost, 4.0, 1e-9);
  EXPECT_NEAR(std::abs(free.value), 0.25, 1e-9);
  EXPECT_NEAR(pinned.value, -0.25, 1e-9);
}

TEST(Rap, NearUniqueTargetCostsOnlyThePerturbation) {
  // Target is the unique equilibrium with value inside the range: the relaxed
  // optimum is the original game and the final cost is |eps| * |eRPS|_1.
  std::mt19937_64 rng(8);
  for (int t = 0; t < 20; ++t) {
    const int m = 2 + static_cast<int>(rng() % 4);
    const Eigen::MatrixXd r0 = testutil::random_matrix(rng, m, m);
    const auto nash = solve_zero_sum(r0);
    const StrategyProfile target(nash.p, nash.q);
    const auto cert = verify_unique_ne(r0, target);
    if (!cert.valid() || cert.min_sow_gap() < 0.01) continue;
    const auto res = rap(MatrixGame(r0), request_for(target));
    EXPECT_NEAR(res.relaxed_cost, 0.0, 1e-8);
    const double erps_l1 = build_erps(target).matrix.cwiseAbs().sum();
    EXPECT_NEAR(res.cost, std::abs(res.perturbations[0]) * erps_l1, 1e-8);
  }
}

TEST(Rap, RandomInstancesAreCertifiedAndWithinLimits) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-1, 1);
  int oracle_checked = 0;
  for (int t = 0; t < 120; ++t) {
    const int m = 2 + static_cast<int>(rng() % 5);
    const int n = 2 + static_cast<int>(rng() % 5);
    const int k = 1 + static_cast<int>(rng() % std::min(m, n));
    const Limit bound = t % 2 == 0 ? Limit() : Limit(1.0);
    const Eigen::MatrixXd r0 = testutil::random_matrix(rng, m, n);
    const StrategyProfile target = testutil::random_profile(rng, m, n, k);
    double a = 0.9 * u(rng);
    double b = 0.9 * u(rng);
    if (a > b) std::swap(a, b);
    const ValueRange range = t % 3 == 0 ? ValueRange{} : ValueRange{a, b};
    auto req = request_for(target, range, bound);
    req.rng_seed = t;
    req.cost = t % 4 == 0 ? CostSpec(ForeverCost{}) : CostSpec(OneTimeL1{});
    const auto res = rap(MatrixGame(r0, std::nullopt), req);
    ASSERT_TRUE(res.certified()) << "trial " << t;
    const Eigen::MatrixXd& r = res.modified_rewards[0];
    EXPECT_TRUE(range.contains(res.value, 1e-7));
    if (bound) EXPECT_LE(r.cwiseAbs().maxCoeff(), *bound);
    // Relaxed solution keeps the full SOW margin.
    const auto relaxed = check_siisow(res.relaxed_rewards[0], target);
    if (relaxed.row_sow_gap) EXPECT_GE(*relaxed.row_sow_gap, req.margin_sow - 1e-8);
    if (relaxed.col_sow_gap) EXPECT_GE(*relaxed.col_sow_gap, req.margin_sow - 1e-8);
    EXPECT_GT(res.certificates[0].min_sow_gap(), 0.0);
    if (m <= 5 && n <= 5) {
      EXPECT_TRUE(enumerate_nash(r).unique_equals(target)) << "trial " << t;
      ++oracle_checked;
    }
  }
  EXPECT_GT(oracle_checked, 60);
}

TEST(Rap, SameSeedSameBits) {
  std::mt19937_64 rng(21);
  const Eigen::MatrixXd r0 = testutil::random_matrix(rng, 5, 5);
  const StrategyProfile target = testutil::random_profile(rng, 5, 5, 3);
  auto req = request_for(target);
  req.rng_seed = 1234;
  const auto a = rap(MatrixGame(r0), req);
  const auto b = rap(MatrixGame(r0), req);
  EXPECT_EQ(a.modified_rewards[0], b.modified_rewards[0]);
  req.rng_seed = 1235;
  const auto c = rap(MatrixGame(r0), req);
  EXPECT_NE(a.perturbations[0], c.perturbations[0]);
}

TEST(Rap, LargeSowMarginRelativeToLambdaStillCertifies) {
  // With iota much smaller than lambda a negative draw can close the SOW gap;
  // the redraw loop must still return a certified game.
  std::mt19937_64 rng(77);
  for (int t = 0; t < 30; ++t) {
    const Eigen::MatrixXd r0 = testutil::random_matrix(rng, 4, 4);
    auto req = request_for(testutil::random_profile(rng, 4, 4, 2));
    req.margin_sow = 1e-5;
    req.margin_reward = 1e-1;
    req.rng_seed = t;
    const auto res = rap(MatrixGame(r0), req);
    EXPECT_TRUE(res.certified());
  }
}

}  // namespace
}  // namespace gamemod
