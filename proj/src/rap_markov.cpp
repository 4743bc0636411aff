#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "gamemod/erps.hpp"
#include "gamemod/errors.hpp"
#include "gamemod/markov.hpp"
#include "relaxation.hpp"

namespace gamemod {

namespace {

const MarkovPolicy& policy_target(const ModificationRequest& request) {
  const auto* pol = std::get_if<MarkovPolicy>(&request.target);
  if (!pol) throw InvalidRequest("Markov modification needs a Markov policy target");
  return *pol;
}

std::string stage_name(int h, int s) { return "h" + std::to_string(h) + "_s" + std::to_string(s); }

Limit scaled(const Limit& x, double f) { return x ? Limit(*x * f) : std::nullopt; }

}  // namespace

StageDecomposition backward_induction(const MarkovGame& game) {
  const int horizon = game.horizon();
  const int states = game.num_states();
  StageDecomposition out;
  out.q.assign(horizon, std::vector<Eigen::MatrixXd>(states));
  out.values.assign(horizon, Eigen::VectorXd::Zero(states));
  Eigen::VectorXd next = Eigen::VectorXd::Zero(states);
  for (int h = horizon - 1; h >= 0; --h) {
    for (int s = 0; s < states; ++s) {
      out.q[h][s] = game.reward(h, s) + game.continuation(h, s, next);
      out.values[h][s] = solve_zero_sum(out.q[h][s]).value;
    }
    next = out.values[h];
  }
  out.initial_value = game.initial().dot(out.values[0]);
  return out;
}

bool MarkovVerification::valid() const {
  if (certificates.empty()) return false;
  return std::all_of(certificates.begin(), certificates.end(),
                     [](const UniquenessCertificate& c) { return c.valid(); });
}

std::vector<int> MarkovVerification::failing_stages() const {
  std::vector<int> out;
  for (int k = 0; k < static_cast<int>(certificates.size()); ++k) {
    if (!certificates[k].valid()) out.push_back(k);
  }
  return out;
}

MarkovVerification verify_mpe_unique(const MarkovGame& game, const MarkovPolicy& policy,
                                     double sii_tol, double inv_tol) {
  policy.check_shape(game);
  MarkovVerification out;
  out.decomposition = backward_induction(game);
  for (int h = 0; h < game.horizon(); ++h) {
    for (int s = 0; s < game.num_states(); ++s) {
      out.certificates.push_back(
          verify_unique_ne(out.decomposition.q[h][s], policy.at(h, s), sii_tol, inv_tol));
    }
  }
  out.value = out.decomposition.initial_value;
  return out;
}

FeasibilityReport check_feasibility_markov(const ModificationRequest& request, int actions1,
                                           int actions2, int horizon, int num_states) {
  const MarkovPolicy& policy = policy_target(request);
  if (policy.horizon() != horizon || policy.num_states() != num_states) {
    throw ShapeError("target policy does not match the game's horizon and state count");
  }
  FeasibilityReport report;
  for (int h = 0; h < horizon; ++h) {
    for (int s = 0; s < num_states; ++s) {
      const StrategyProfile& prof = policy.at(h, s);
      if (prof.rows() != actions1 || prof.cols() != actions2) {
        throw ShapeError("target profile at " + stage_name(h, s) + " does not match the action sets");
      }
      if (!prof.supports_equal()) {
        report.feasible = false;
        report.violations.push_back("target supports at " + stage_name(h, s) + " have sizes " +
                                    std::to_string(prof.row_support().size()) + " and " +
                                    std::to_string(prof.col_support().size()));
      }
    }
  }
  const auto& range = request.value_range;
  if (request.bound) {
    const double b = *request.bound;
    const double hb = horizon * b;
    if (!detail::open_meets_closed(-hb, hb, range.lo, range.hi)) {
      report.feasible = false;
      std::ostringstream msg;
      msg << "value range misses the open interval (-" << hb << ", " << hb << ")";
      report.violations.push_back(msg.str());
    }
    const double slack = b - request.margin_reward - request.margin_sow;
    const Limit lo = scaled(range.lo, 1.0 / horizon);
    const Limit hi = scaled(range.hi, 1.0 / horizon);
    report.margin_ok = detail::open_meets_closed(-slack, slack, lo, hi);
    if (!report.margin_ok) {
      std::ostringstream msg;
      msg << "margin interval (" << -slack << ", " << slack << ") misses the per-period value range";
      report.violations.push_back(msg.str());
    }
    if (lo) {
      const bool alt = detail::open_meets_closed(-slack, slack, Limit(-*lo), hi);
      if (alt != report.margin_ok) {
        report.notes.push_back(std::string("margin check reads the value bracket as [v_lo, v_hi]; ") +
                               "the [-v_lo, v_hi] reading would give " + (alt ? "true" : "false"));
      }
    }
  }
  return report;
}

RelaxedMarkovProgram build_relaxed_program_markov(const MarkovGame& original,
                                                  const ModificationRequest& request) {
  request.validate();
  const MarkovPolicy& policy = policy_target(request);
  policy.check_shape(original);
  const int horizon = original.horizon();
  const int states = original.num_states();
  const int a1 = original.actions1();
  const int a2 = original.actions2();
  const FeasibilityReport report = check_feasibility_markov(request, a1, a2, horizon, states);
  if (!report.feasible) throw InfeasibleRequest(detail::join(report.violations));

  const StageDecomposition start = backward_induction(original);
  const double lo = detail::reward_lower(request.bound, request.margin_reward);
  const double hi = detail::reward_upper(request.bound, request.margin_reward);

  RelaxedMarkovProgram prog;
  auto& model = prog.model;
  using Grid = std::vector<std::vector<int>>;
  prog.reward_vars.assign(horizon, std::vector<Grid>(states, Grid(a1, std::vector<int>(a2))));
  prog.q_vars = prog.reward_vars;
  prog.value_vars.assign(horizon, std::vector<int>(states));
  for (int h = 0; h < horizon; ++h) {
    for (int s = 0; s < states; ++s) {
      const std::string tag = stage_name(h, s);
      for (int i = 0; i < a1; ++i) {
        for (int j = 0; j < a2; ++j) {
          const std::string ij = "_" + std::to_string(i) + "_" + std::to_string(j);
          const int r = model.add_variable("R_" + tag + ij, lo, hi);
          model.set_start(r, original.reward(h, s)(i, j));
          prog.reward_vars[h][s][i][j] = r;
          const int q = model.add_variable("Q_" + tag + ij, -lp::kInf, lp::kInf);
          model.set_start(q, start.q[h][s](i, j));
          prog.q_vars[h][s][i][j] = q;
        }
      }
      const int v = model.add_variable("v_" + tag, -lp::kInf, lp::kInf);
      model.set_start(v, start.values[h][s]);
      prog.value_vars[h][s] = v;
    }
  }

  // Q_h(s) = R_h(s) + sum_s' P_h(s' | s) v_{h+1}(s').
  for (int h = 0; h < horizon; ++h) {
    for (int s = 0; s < states; ++s) {
      for (int i = 0; i < a1; ++i) {
        for (int j = 0; j < a2; ++j) {
          lp::LinearExpr expr;
          expr.push_back({prog.q_vars[h][s][i][j], 1.0});
          expr.push_back({prog.reward_vars[h][s][i][j], -1.0});
          if (h + 1 < horizon) {
            for (int t = 0; t < states; ++t) {
              const double pr = original.transition(h, s, t)(i, j);
              if (pr != 0.0) expr.push_back({prog.value_vars[h + 1][t], -pr});
            }
          }
          model.add_constraint(expr, lp::Relation::Equal, 0.0,
                               "bellman_" + stage_name(h, s) + "_" + std::to_string(i) + "_" +
                                   std::to_string(j));
        }
      }
      detail::add_siisow_rows(model, prog.q_vars[h][s], prog.value_vars[h][s], policy.at(h, s),
                              request.margin_sow, stage_name(h, s) + "_");
    }
  }

  const auto& range = request.value_range;
  if (range.lo || range.hi) {
    lp::LinearExpr expr;
    for (int s = 0; s < states; ++s) {
      if (original.initial()[s] != 0.0) expr.push_back({prog.value_vars[0][s], original.initial()[s]});
    }
    if (range.lo && range.hi && *range.lo == *range.hi) {
      model.add_constraint(expr, lp::Relation::Equal, *range.lo, "value");
    } else {
      if (range.lo) model.add_constraint(expr, lp::Relation::GreaterEqual, *range.lo, "value_lo");
      if (range.hi) model.add_constraint(expr, lp::Relation::LessEqual, *range.hi, "value_hi");
    }
  }

  std::vector<lp::AbsTerm> terms;
  for (int h = 0; h < horizon; ++h) {
    for (int s = 0; s < states; ++s) {
      const Eigen::MatrixXd w = cost_weights(request.cost, policy.at(h, s), h * states + s);
      for (int i = 0; i < a1; ++i) {
        for (int j = 0; j < a2; ++j) {
          terms.push_back({prog.reward_vars[h][s][i][j], original.reward(h, s)(i, j), w(i, j)});
        }
      }
    }
  }
  lp::encode_abs_cost(model, terms);
  return prog;
}

ModificationResult rap_mg(const MarkovGame& original, const ModificationRequest& request) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  const MarkovPolicy& policy = policy_target(request);
  RelaxedMarkovProgram prog = build_relaxed_program_markov(original, request);

  ModificationResult result;
  const auto lp_start = Clock::now();
  const lp::LpSolution sol = lp::solve_lp(prog.model);
  result.stats.lp_seconds = std::chrono::duration<double>(Clock::now() - lp_start).count();
  result.stats.lp_iterations = sol.iterations;
  result.stats.lp_rows = prog.model.num_constraints();
  result.stats.lp_columns = prog.model.num_variables();
  if (sol.status == lp::Status::Infeasible) {
    const FeasibilityReport report = check_feasibility_markov(
        request, original.actions1(), original.actions2(), original.horizon(), original.num_states());
    throw InfeasibleRequest(std::string("relaxed program is infeasible") +
                            (report.margin_ok ? "" : " (margin precondition fails: " +
                                                         detail::join(report.violations) + ")"));
  }
  if (sol.status != lp::Status::Optimal) {
    throw SolverFailure(std::string("relaxed program is ") + lp::to_string(sol.status));
  }

  const int horizon = original.horizon();
  const int states = original.num_states();
  const int a1 = original.actions1();
  const int a2 = original.actions2();
  const int stages = horizon * states;
  const double lo = detail::reward_lower(request.bound, request.margin_reward);
  const double hi = detail::reward_upper(request.bound, request.margin_reward);

  std::vector<std::vector<Eigen::MatrixXd>> relaxed(horizon, std::vector<Eigen::MatrixXd>(states));
  std::vector<double> lp_values(stages);
  std::vector<ErpsGame> erps;
  for (int h = 0; h < horizon; ++h) {
    for (int s = 0; s < states; ++s) {
      Eigen::MatrixXd r(a1, a2);
      for (int i = 0; i < a1; ++i) {
        for (int j = 0; j < a2; ++j) {
          r(i, j) = std::clamp(sol.values[prog.reward_vars[h][s][i][j]], lo, hi);
        }
      }
      relaxed[h][s] = r;
      lp_values[h * states + s] = sol.values[prog.value_vars[h][s]];
      erps.push_back(build_erps(policy.at(h, s)));
      for (const auto& w : erps.back().warnings) result.warnings.push_back(stage_name(h, s) + ": " + w);
    }
  }

  detail::PerturbationStream stream(request.rng_seed);
  std::vector<double> eps(stages);
  for (int k = 0; k < stages; ++k) eps[k] = stream.next(request.margin_reward);

  std::ostringstream failures;
  for (int round = 0; round <= kMaxRedraws; ++round) {
    std::vector<std::vector<Eigen::MatrixXd>> modified = relaxed;
    for (int h = 0; h < horizon; ++h) {
      for (int s = 0; s < states; ++s) modified[h][s] += eps[h * states + s] * erps[h * states + s].matrix;
    }
    const MarkovVerification ver = verify_mpe_unique(original.with_rewards(modified), policy);
    std::vector<int> failing = ver.failing_stages();
    if (request.bound) {
      for (int k = 0; k < stages; ++k) {
        if (modified[k / states][k % states].cwiseAbs().maxCoeff() > *request.bound) failing.push_back(k);
      }
    }
    std::sort(failing.begin(), failing.end());
    failing.erase(std::unique(failing.begin(), failing.end()), failing.end());
    const bool in_range = request.value_range.contains(ver.value, kSiiTolerance * horizon);

    if (failing.empty() && in_range) {
      const StageDecomposition& dec = ver.decomposition;
      double residual = 0.0;
      for (int h = 0; h < horizon; ++h) {
        Eigen::VectorXd next = Eigen::VectorXd::Zero(states);
        if (h + 1 < horizon) {
          for (int t = 0; t < states; ++t) next[t] = lp_values[(h + 1) * states + t];
        }
        for (int s = 0; s < states; ++s) {
          const Eigen::MatrixXd q_lp = modified[h][s] + original.continuation(h, s, next);
          residual = std::max(residual, (q_lp - dec.q[h][s]).cwiseAbs().maxCoeff());
          residual = std::max(residual, std::abs(lp_values[h * states + s] - dec.values[h][s]));
        }
      }
      result.bellman_residual = residual;
      result.value = ver.value;
      for (int h = 0; h < horizon; ++h) {
        for (int s = 0; s < states; ++s) {
          const int k = h * states + s;
          result.modified_rewards.push_back(modified[h][s]);
          result.relaxed_rewards.push_back(relaxed[h][s]);
          result.stage_values.push_back(dec.values[h][s]);
          result.cost += modification_cost(request.cost, policy.at(h, s), k, modified[h][s],
                                           original.reward(h, s));
          result.relaxed_cost += modification_cost(request.cost, policy.at(h, s), k, relaxed[h][s],
                                                   original.reward(h, s));
        }
      }
      result.lp_stage_values = lp_values;
      result.certificates = ver.certificates;
      result.perturbations = eps;
      result.stats.total_seconds = std::chrono::duration<double>(Clock::now() - start).count();
      return result;
    }

    failures << " [round " << round << ": " << failing.size() << " failing stages"
             << (in_range ? "" : ", value out of range") << "]";
    if (round == kMaxRedraws) break;
    if (failing.empty()) {
      // Only the value is off; the perturbation cannot move it, so redraw everything.
      for (int k = 0; k < stages; ++k) failing.push_back(k);
    }
    for (int k : failing) eps[k] = stream.next(request.margin_reward);
    ++result.stats.redraws;
  }
  throw CertificationFailure("no perturbation certified after " + std::to_string(kMaxRedraws + 1) +
                             " rounds:" + failures.str());
}

double stagewise_optimum(const MarkovGame& original, const ModificationRequest& request) {
  request.validate();
  const MarkovPolicy& policy = policy_target(request);
  policy.check_shape(original);
  const int horizon = original.horizon();
  const int states = original.num_states();
  const int a1 = original.actions1();
  const int a2 = original.actions2();
  const double lo = detail::reward_lower(request.bound, request.margin_reward);
  const double hi = detail::reward_upper(request.bound, request.margin_reward);

  double total = 0.0;
  Eigen::VectorXd next = Eigen::VectorXd::Zero(states);
  for (int h = horizon - 1; h >= 0; --h) {
    Eigen::VectorXd values(states);
    for (int s = 0; s < states; ++s) {
      const Eigen::MatrixXd cont = original.continuation(h, s, next);
      const Eigen::MatrixXd& r0 = original.reward(h, s);
      lp::LpModel model;
      std::vector<std::vector<int>> rv(a1, std::vector<int>(a2));
      std::vector<std::vector<int>> qv(a1, std::vector<int>(a2));
      for (int i = 0; i < a1; ++i) {
        for (int j = 0; j < a2; ++j) {
          rv[i][j] = model.add_variable("R_" + std::to_string(i) + "_" + std::to_string(j), lo, hi);
          model.set_start(rv[i][j], r0(i, j));
          qv[i][j] = model.add_variable("Q_" + std::to_string(i) + "_" + std::to_string(j),
                                        -lp::kInf, lp::kInf);
          model.set_start(qv[i][j], r0(i, j) + cont(i, j));
          model.add_constraint({{qv[i][j], 1.0}, {rv[i][j], -1.0}}, lp::Relation::Equal, cont(i, j),
                               "bellman_" + std::to_string(i) + "_" + std::to_string(j));
        }
      }
      const int v = model.add_variable("v", -lp::kInf, lp::kInf);
      detail::add_siisow_rows(model, qv, v, policy.at(h, s), request.margin_sow, "");
      const Eigen::MatrixXd w = cost_weights(request.cost, policy.at(h, s), h * states + s);
      std::vector<lp::AbsTerm> terms;
      for (int i = 0; i < a1; ++i) {
        for (int j = 0; j < a2; ++j) terms.push_back({rv[i][j], r0(i, j), w(i, j)});
      }
      lp::encode_abs_cost(model, terms);
      const lp::LpSolution sol = lp::solve_lp(model);
      if (sol.status != lp::Status::Optimal) {
        throw SolverFailure("stage program at " + stage_name(h, s) + " is " + lp::to_string(sol.status));
      }
      total += sol.objective;
      values[s] = sol.values[v];
    }
    next = values;
  }
  return total;
}

}  // namespace gamemod
