#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <sstream>

#include "gamemod/errors.hpp"
#include "gamemod/lp.hpp"

namespace gamemod::lp {
namespace {

TEST(SolveLp, SingleLowerBoundRow) {
  LpModel m;
  const int x = m.add_variable("x", -kInf, kInf);
  m.add_constraint({{x, 1.0}}, Relation::GreaterEqual, 3.0);
  m.add_objective(x, 1.0);
  const auto sol = solve_lp(m);
  ASSERT_EQ(sol.status, Status::Optimal);
  EXPECT_NEAR(sol.values[x], 3.0, 1e-12);
  EXPECT_NEAR(sol.objective, 3.0, 1e-12);
}

TEST(SolveLp, MaximinOfSimplifiedMorra) {
  // max v s.t. p^T R >= v 1^T, p in simplex, written as min -v.
  const double r[2][2] = {{2, -3}, {-3, 4}};
  LpModel m;
  const int p0 = m.add_variable("p0");
  const int p1 = m.add_variable("p1");
  const int v = m.add_variable("v", -kInf, kInf);
  for (int j = 0; j < 2; ++j) {
    m.add_constraint({{p0, r[0][j]}, {p1, r[1][j]}, {v, -1.0}}, Relation::GreaterEqual, 0.0);
  }
  m.add_constraint({{p0, 1.0}, {p1, 1.0}}, Relation::Equal, 1.0);
  m.add_objective(v, -1.0);
  const auto sol = solve_lp(m);
  ASSERT_EQ(sol.status, Status::Optimal);
  EXPECT_NEAR(sol.values[v], -1.0 / 12.0, 1e-10);
  EXPECT_NEAR(sol.values[p0], 7.0 / 12.0, 1e-10);
}

TEST(SolveLp, ContradictoryEqualitiesAreInfeasible) {
  LpModel m;
  const int x = m.add_variable("x", -kInf, kInf);
  m.add_constraint({{x, 1.0}}, Relation::Equal, 1.0);
  m.add_constraint({{x, 1.0}}, Relation::Equal, 2.0);
  EXPECT_EQ(solve_lp(m).status, Status::Infeasible);
}

TEST(SolveLp, DetectsUnboundedRay) {
  LpModel m;
  const int x = m.add_variable("x", 0.0, kInf);
  const int y = m.add_variable("y", 0.0, kInf);
  m.add_constraint({{x, 1.0}, {y, -1.0}}, Relation::LessEqual, 1.0);
  m.add_objective(y, -1.0);
  EXPECT_EQ(solve_lp(m).status, Status::Unbounded);
}

TEST(SolveLp, NoRowsUsesBounds) {
  LpModel m;
  const int x = m.add_variable("x", -2.0, 5.0);
  const int y = m.add_variable("y", -2.0, 5.0);
  m.add_objective(x, 1.0);
  m.add_objective(y, -1.0);
  const auto sol = solve_lp(m);
  ASSERT_EQ(sol.status, Status::Optimal);
  EXPECT_EQ(sol.values[x], -2.0);
  EXPECT_EQ(sol.values[y], 5.0);
}

TEST(SolveLp, FixedVariableAndBoundFlip) {
  LpModel m;
  const int x = m.add_variable("x", 1.0, 1.0);
  const int y = m.add_variable("y", 0.0, 2.0);
  m.add_constraint({{x, 1.0}, {y, 1.0}}, Relation::LessEqual, 10.0);
  m.add_objective(y, -1.0);
  const auto sol = solve_lp(m);
  ASSERT_EQ(sol.status, Status::Optimal);
  EXPECT_EQ(sol.values[y], 2.0);
  EXPECT_EQ(sol.values[x], 1.0);
}

TEST(SolveLp, RejectsInvertedBounds) {
  LpModel m;
  EXPECT_THROW(m.add_variable("x", 1.0, 0.0), InvalidRequest);
  EXPECT_THROW(m.add_constraint({{3, 1.0}}, Relation::Equal, 0.0), InvalidRequest);
}

// Exhaustive vertex enumeration for boxed LPs with few variables: every
// vertex is the solution of n linearly independent active constraints.
struct BoxedLp {
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  std::vector<Relation> rel;
  Eigen::VectorXd c;
  double box;
};

std::optional<double> brute_force_min(const BoxedLp& lp) {
  const int n = static_cast<int>(lp.c.size());
  const int m = static_cast<int>(lp.b.size());
  // Candidate hyperplanes: rows plus x_j = +-box.
  std::vector<Eigen::VectorXd> normals;
  std::vector<double> rhs;
  for (int i = 0; i < m; ++i) {
    normals.push_back(lp.a.row(i).transpose());
    rhs.push_back(lp.b[i]);
  }
  for (int j = 0; j < n; ++j) {
    for (double s : {-1.0, 1.0}) {
      normals.push_back(Eigen::VectorXd::Unit(n, j));
      rhs.push_back(s * lp.box);
    }
  }
  const int h = static_cast<int>(normals.size());
  std::optional<double> best;
  std::vector<int> pick(n);
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == n) {
      Eigen::MatrixXd mat(n, n);
      Eigen::VectorXd r(n);
      for (int k = 0; k < n; ++k) {
        mat.row(k) = normals[pick[k]].transpose();
        r[k] = rhs[pick[k]];
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(mat);
      if (lu.rank() < n) return;
      const Eigen::VectorXd x = lu.solve(r);
      for (int j = 0; j < n; ++j) {
        if (std::abs(x[j]) > lp.box + 1e-9) return;
      }
      for (int i = 0; i < m; ++i) {
        const double act = lp.a.row(i).dot(x);
        if (lp.rel[i] == Relation::LessEqual && act > lp.b[i] + 1e-9) return;
        if (lp.rel[i] == Relation::GreaterEqual && act < lp.b[i] - 1e-9) return;
        if (lp.rel[i] == Relation::Equal && std::abs(act - lp.b[i]) > 1e-9) return;
      }
      const double obj = lp.c.dot(x);
      if (!best || obj < *best) best = obj;
      return;
    }
    for (int k = start; k < h; ++k) {
      pick[depth] = k;
      rec(k + 1, depth + 1);
    }
  };
  rec(0, 0);
  return best;
}

TEST(SolveLp, MatchesVertexEnumerationOnRandomBoxedPrograms) {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int optimal = 0;
  int infeasible = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 3);
    const int m = 1 + static_cast<int>(rng() % 4);
    BoxedLp lp{Eigen::MatrixXd(m, n), Eigen::VectorXd(m), {}, Eigen::VectorXd(n), 3.0};
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) lp.a(i, j) = std::round(4 * u(rng)) / 2;
      lp.b[i] = std::round(4 * u(rng)) / 2;
      const auto pick = rng() % 5;
      lp.rel.push_back(pick == 0 ? Relation::Equal
                                 : (pick < 3 ? Relation::LessEqual : Relation::GreaterEqual));
    }
    for (int j = 0; j < n; ++j) lp.c[j] = std::round(4 * u(rng)) / 2;

    LpModel model;
    for (int j = 0; j < n; ++j) model.add_variable("x" + std::to_string(j), -lp.box, lp.box);
    for (int i = 0; i < m; ++i) {
      LinearExpr e;
      for (int j = 0; j < n; ++j) e.push_back({j, lp.a(i, j)});
      model.add_constraint(e, lp.rel[i], lp.b[i]);
    }
    for (int j = 0; j < n; ++j) model.add_objective(j, lp.c[j]);

    const auto expected = brute_force_min(lp);
    const auto sol = solve_lp(model);
    if (!expected) {
      EXPECT_EQ(sol.status, Status::Infeasible) << "trial " << trial;
      ++infeasible;
    } else {
      ASSERT_EQ(sol.status, Status::Optimal) << "trial " << trial;
      EXPECT_NEAR(sol.objective, *expected, 1e-9) << "trial " << trial;
      EXPECT_LE(max_constraint_violation(model, sol.values), kFeasibilityTol);
      ++optimal;
    }
  }
  EXPECT_GT(optimal, 100);
  EXPECT_GT(infeasible, 5);
}

LpModel random_transport(std::mt19937_64& rng, int size) {
  // Feasible, bounded: supplies and demands balance, costs nonnegative.
  std::uniform_real_distribution<double> u(0.0, 1.0);
  LpModel m;
  std::vector<std::vector<int>> x(size, std::vector<int>(size));
  for (int i = 0; i < size; ++i) {
    for (int j = 0; j < size; ++j) {
      x[i][j] = m.add_variable("x_" + std::to_string(i) + "_" + std::to_string(j));
      m.add_objective(x[i][j], std::round(100 * u(rng)) / 10);
    }
  }
  for (int i = 0; i < size; ++i) {
    LinearExpr row;
    LinearExpr col;
    for (int j = 0; j < size; ++j) {
      row.push_back({x[i][j], 1.0});
      col.push_back({x[j][i], 1.0});
    }
    m.add_constraint(row, Relation::Equal, 1.0);
    m.add_constraint(col, Relation::GreaterEqual, 1.0);
  }
  return m;
}

TEST(SolveLp, ObjectiveScalingScalesOptimum) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    LpModel base = random_transport(rng, 6);
    LpModel scaled = base;
    const double alpha = 0.5 + trial;
    for (int j = 0; j < scaled.num_variables(); ++j) {
      scaled.add_objective(j, (alpha - 1.0) * base.variable(j).cost);
    }
    const auto s1 = solve_lp(base);
    const auto s2 = solve_lp(scaled);
    ASSERT_EQ(s1.status, Status::Optimal);
    ASSERT_EQ(s2.status, Status::Optimal);
    EXPECT_NEAR(s2.objective, alpha * s1.objective, 1e-9 * (1 + std::abs(s2.objective)));
    // The scaled argmin is optimal for the base objective too.
    double base_obj_at_s2 = 0.0;
    for (int j = 0; j < base.num_variables(); ++j) base_obj_at_s2 += base.variable(j).cost * s2.values[j];
    EXPECT_NEAR(base_obj_at_s2, s1.objective, 1e-9 * (1 + std::abs(s1.objective)));
  }
}

TEST(SolveLp, RepeatedSolvesAreBitIdentical) {
  std::mt19937_64 rng(99);
  const LpModel m = random_transport(rng, 8);
  const auto a = solve_lp(m);
  const auto b = solve_lp(m);
  ASSERT_EQ(a.status, Status::Optimal);
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(a.iterations, b.iterations);
}

TEST(EncodeAbsCost, DistanceToFixedValue) {
  LpModel m;
  const int x = m.add_variable("x", 7.0, 7.0);
  const auto handle = encode_abs_cost(m, {{x, 5.0, 1.0}});
  ASSERT_EQ(handle.aux.size(), 1u);
  const auto sol = solve_lp(m);
  ASSERT_EQ(sol.status, Status::Optimal);
  EXPECT_NEAR(sol.objective, 2.0, 1e-12);
}

TEST(EncodeAbsCost, ZeroWeightsGiveZeroObjective) {
  LpModel m;
  const int x = m.add_variable("x", -kInf, kInf);
  const int y = m.add_variable("y", -kInf, kInf);
  m.add_constraint({{x, 1.0}, {y, 1.0}}, Relation::Equal, 4.0);
  const auto handle = encode_abs_cost(m, {{x, 1.0, 0.0}, {y, -3.0, 0.0}});
  EXPECT_EQ(handle.aux[0], -1);
  EXPECT_EQ(m.num_variables(), 2);
  const auto sol = solve_lp(m);
  ASSERT_EQ(sol.status, Status::Optimal);
  EXPECT_EQ(sol.objective, 0.0);
}

TEST(EncodeAbsCost, PureTargetWeightsOnlyCountThatEntry) {
  // Weights p_i q_j for a pure target (1, 0): only x00 is charged.
  LpModel m;
  std::vector<int> x;
  for (int k = 0; k < 4; ++k) x.push_back(m.add_variable("x" + std::to_string(k), -kInf, kInf));
  m.add_constraint({{x[0], 1.0}, {x[1], 1.0}, {x[2], 1.0}, {x[3], 1.0}}, Relation::Equal, 10.0);
  encode_abs_cost(m, {{x[0], 2.0, 1.0}, {x[1], 0.0, 0.0}, {x[2], 0.0, 0.0}, {x[3], 0.0, 0.0}});
  const auto sol = solve_lp(m);
  ASSERT_EQ(sol.status, Status::Optimal);
  EXPECT_NEAR(sol.objective, 0.0, 1e-12);
  EXPECT_NEAR(sol.values[x[0]], 2.0, 1e-12);
}

TEST(EncodeAbsCost, NegativeWeightRejected) {
  LpModel m;
  const int x = m.add_variable("x");
  EXPECT_THROW(encode_abs_cost(m, {{x, 0.0, -1.0}}), InvalidCost);
}

TEST(LpFormat, WritesSectionsAndBounds) {
  LpModel m;
  const int x = m.add_variable("x", -kInf, kInf);
  const int y = m.add_variable("y", 0.0, 4.0);
  m.add_constraint({{x, 1.0}, {y, -2.0}}, Relation::LessEqual, 3.0, "cap");
  m.add_objective(x, 1.0);
  std::ostringstream out;
  m.write_lp_format(out);
  const std::string text = out.str();
  EXPECT_NE(text.find("Minimize"), std::string::npos);
  EXPECT_NE(text.find("cap: 1 x - 2 y <= 3"), std::string::npos);
  EXPECT_NE(text.find("x free"), std::string::npos);
  EXPECT_NE(text.find("0 <= y <= 4"), std::string::npos);
  EXPECT_NE(text.find("End"), std::string::npos);
}

}  // namespace
}  // namespace gamemod::lp
