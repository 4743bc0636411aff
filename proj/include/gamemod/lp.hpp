#pragma once

#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace gamemod::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kFeasibilityTol = 1e-8;

enum class Relation { LessEqual, Equal, GreaterEqual };

struct Term {
  int var;
  double coef;
};

using LinearExpr = std::vector<Term>;

struct Variable {
  std::string name;
  double lower;
  double upper;
  double start;  // initial value for nonbasic free variables, clamped to bounds
  double cost;
};

struct Constraint {
  std::string name;
  LinearExpr expr;
  Relation relation;
  double rhs;
};

// Minimization LP: variable bounds, linear rows, linear objective.
class LpModel {
 public:
  // Returns the variable index. Throws InvalidRequest when lower > upper.
  int add_variable(std::string name, double lower = 0.0, double upper = kInf);
  // Returns the constraint index. Throws InvalidRequest on undeclared variables.
  int add_constraint(LinearExpr expr, Relation relation, double rhs, std::string name = {});
  // Adds coef * x_var to the objective.
  void add_objective(int var, double coef);
  void set_start(int var, double value);

  int num_variables() const { return static_cast<int>(vars_.size()); }
  int num_constraints() const { return static_cast<int>(rows_.size()); }
  const Variable& variable(int j) const { return vars_[j]; }
  const Constraint& constraint(int i) const { return rows_[i]; }
  const std::vector<Variable>& variables() const { return vars_; }
  const std::vector<Constraint>& constraints() const { return rows_; }

  // CPLEX LP text format.
  void write_lp_format(std::ostream& out) const;

 private:
  void check_var(int var) const;

  std::vector<Variable> vars_;
  std::vector<Constraint> rows_;
};

enum class Status { Optimal, Infeasible, Unbounded };

const char* to_string(Status status);

struct LpSolution {
  Status status = Status::Infeasible;
  std::vector<double> values;
  double objective = 0.0;
  long iterations = 0;
};

struct SolverOptions {
  double primal_tol = 1e-9;
  double dual_tol = 1e-9;
  long max_iterations = -1;  // negative: scaled with model size
  int refactor_interval = 100;
  int degenerate_switch = 100;  // consecutive degenerate steps before Bland's rule
};

// Bounded-variable revised primal simplex. Deterministic for a fixed model.
// Throws NumericalFailure on basis breakdown, SolverFailure on iteration limit.
LpSolution solve_lp(const LpModel& model, const SolverOptions& options = {});

struct AbsTerm {
  int var;
  double constant;
  double weight;
};

struct AbsObjective {
  std::vector<int> aux;  // t_k per term; -1 where the weight was zero
};

// Adds t_k >= |x_k - c_k| as two rows and weight * t_k to the objective.
// Zero-weight terms add nothing. Throws InvalidCost on negative weights.
AbsObjective encode_abs_cost(LpModel& model, const std::vector<AbsTerm>& terms);

// Largest bound or row violation of `values`.
double max_constraint_violation(const LpModel& model, const std::vector<double>& values);

double row_activity(const Constraint& row, const std::vector<double>& values);

}  // namespace gamemod::lp
