#include <algorithm>
#include <chrono>
#include <sstream>

#include "gamemod/erps.hpp"
#include "gamemod/errors.hpp"
#include "gamemod/rap.hpp"
#include "gamemod/uniqueness.hpp"
#include "relaxation.hpp"

namespace gamemod {

namespace {

const StrategyProfile& profile_target(const ModificationRequest& request) {
  const auto* prof = std::get_if<StrategyProfile>(&request.target);
  if (!prof) throw InvalidRequest("normal-form modification needs a strategy profile target");
  return *prof;
}

std::string fmt(const Limit& x, bool upper) {
  if (!x) return upper ? "+inf" : "-inf";
  std::ostringstream out;
  out << *x;
  return out.str();
}

}  // namespace

FeasibilityReport check_feasibility_normal(const ModificationRequest& request, int rows, int cols) {
  const StrategyProfile& target = profile_target(request);
  if (target.rows() != rows || target.cols() != cols) {
    throw ShapeError("target profile does not match the game dimensions");
  }
  FeasibilityReport report;
  if (!target.supports_equal()) {
    report.feasible = false;
    report.violations.push_back("target supports have sizes " +
                                std::to_string(target.row_support().size()) + " and " +
                                std::to_string(target.col_support().size()));
  }
  const auto& range = request.value_range;
  if (request.bound) {
    const double b = *request.bound;
    if (!detail::open_meets_closed(-b, b, range.lo, range.hi)) {
      report.feasible = false;
      std::ostringstream msg;
      msg << "value range [" << fmt(range.lo, false) << ", " << fmt(range.hi, true)
          << "] misses the open interval (-" << b << ", " << b << ")";
      report.violations.push_back(msg.str());
    }
    const double slack = b - request.margin_reward - request.margin_sow;
    report.margin_ok = detail::open_meets_closed(-slack, slack, range.lo, range.hi);
    if (!report.margin_ok) {
      std::ostringstream msg;
      msg << "margin interval (" << -slack << ", " << slack << ") misses the value range";
      report.violations.push_back(msg.str());
    }
    if (range.lo) {
      const bool alt = detail::open_meets_closed(-slack, slack, Limit(-*range.lo), range.hi);
      if (alt != report.margin_ok) {
        report.notes.push_back(std::string("margin check reads the value bracket as [v_lo, v_hi]; ") +
                               "the [-v_lo, v_hi] reading would give " + (alt ? "true" : "false"));
      }
    }
  }
  return report;
}

RelaxedProgram build_relaxed_program(const MatrixGame& original, const ModificationRequest& request) {
  request.validate();
  const StrategyProfile& target = profile_target(request);
  const FeasibilityReport report = check_feasibility_normal(request, original.rows(), original.cols());
  if (!report.feasible) throw InfeasibleRequest(detail::join(report.violations));

  const int m = original.rows();
  const int n = original.cols();
  const Eigen::MatrixXd& r0 = original.payoff();
  RelaxedProgram prog;
  auto& model = prog.model;
  const double lo = detail::reward_lower(request.bound, request.margin_reward);
  const double hi = detail::reward_upper(request.bound, request.margin_reward);
  prog.reward_vars.assign(m, std::vector<int>(n));
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      const int x = model.add_variable("R_" + std::to_string(i) + "_" + std::to_string(j), lo, hi);
      model.set_start(x, r0(i, j));
      prog.reward_vars[i][j] = x;
    }
  }
  const auto& range = request.value_range;
  prog.value_var = model.add_variable("v", range.lo ? *range.lo : -lp::kInf,
                                      range.hi ? *range.hi : lp::kInf);
  model.set_start(prog.value_var, expected_payoff(r0, target));

  detail::add_siisow_rows(model, prog.reward_vars, prog.value_var, target, request.margin_sow, "");

  const Eigen::MatrixXd w = cost_weights(request.cost, target, 0);
  std::vector<lp::AbsTerm> terms;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) terms.push_back({prog.reward_vars[i][j], r0(i, j), w(i, j)});
  }
  lp::encode_abs_cost(model, terms);
  return prog;
}

double modification_cost(const CostSpec& cost, const StrategyProfile& target, int stage,
                         const Eigen::MatrixXd& modified, const Eigen::MatrixXd& original) {
  const Eigen::MatrixXd w = cost_weights(cost, target, stage);
  return (w.array() * (modified - original).array().abs()).sum();
}

ModificationResult rap(const MatrixGame& original, const ModificationRequest& request) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  const StrategyProfile& target = profile_target(request);
  RelaxedProgram prog = build_relaxed_program(original, request);

  ModificationResult result;
  const auto lp_start = Clock::now();
  const lp::LpSolution sol = lp::solve_lp(prog.model);
  result.stats.lp_seconds = std::chrono::duration<double>(Clock::now() - lp_start).count();
  result.stats.lp_iterations = sol.iterations;
  result.stats.lp_rows = prog.model.num_constraints();
  result.stats.lp_columns = prog.model.num_variables();
  if (sol.status == lp::Status::Infeasible) {
    const FeasibilityReport report =
        check_feasibility_normal(request, original.rows(), original.cols());
    throw InfeasibleRequest(std::string("relaxed program is infeasible") +
                            (report.margin_ok ? "" : " (margin precondition fails: " +
                                                         detail::join(report.violations) + ")"));
  }
  if (sol.status != lp::Status::Optimal) {
    throw SolverFailure(std::string("relaxed program is ") + lp::to_string(sol.status));
  }

  const int m = original.rows();
  const int n = original.cols();
  const double lo = detail::reward_lower(request.bound, request.margin_reward);
  const double hi = detail::reward_upper(request.bound, request.margin_reward);
  Eigen::MatrixXd relaxed(m, n);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) relaxed(i, j) = std::clamp(sol.values[prog.reward_vars[i][j]], lo, hi);
  }
  const double lp_value = sol.values[prog.value_var];

  const ErpsGame erps = build_erps(target);
  result.warnings = erps.warnings;
  detail::PerturbationStream stream(request.rng_seed);
  std::ostringstream failures;
  for (int attempt = 0; attempt <= kMaxRedraws; ++attempt) {
    const double eps = stream.next(request.margin_reward);
    const Eigen::MatrixXd modified = relaxed + eps * erps.matrix;
    const UniquenessCertificate cert = verify_unique_ne(modified, target);
    const bool in_range = request.value_range.contains(cert.game_value, kSiiTolerance);
    const bool in_bounds = !request.bound || modified.cwiseAbs().maxCoeff() <= *request.bound;
    if (cert.valid() && in_range && in_bounds) {
      result.modified_rewards = {modified};
      result.relaxed_rewards = {relaxed};
      result.value = cert.game_value;
      result.stage_values = {cert.game_value};
      result.lp_stage_values = {lp_value};
      result.cost = modification_cost(request.cost, target, 0, modified, original.payoff());
      result.relaxed_cost = modification_cost(request.cost, target, 0, relaxed, original.payoff());
      result.certificates = {cert};
      result.perturbations = {eps};
      result.stats.redraws = attempt;
      result.stats.total_seconds = std::chrono::duration<double>(Clock::now() - start).count();
      return result;
    }
    failures << " [eps=" << eps << " sigma_min=" << cert.sigma_min << " gap=" << cert.min_sow_gap()
             << " residual=" << std::max(cert.row_sii_residual, cert.col_sii_residual)
             << " in_range=" << in_range << " in_bounds=" << in_bounds << "]";
  }
  throw CertificationFailure("no perturbation certified after " + std::to_string(kMaxRedraws + 1) +
                             " draws:" + failures.str());
}

}  // namespace gamemod
