#include <algorithm>
#include <cctype>
#include <cmath>
#include <ostream>

#include "gamemod/errors.hpp"
#include "gamemod/lp.hpp"

namespace gamemod::lp {

int LpModel::add_variable(std::string name, double lower, double upper) {
  if (std::isnan(lower) || std::isnan(upper) || lower > upper) {
    throw InvalidRequest("variable '" + name + "' has lower > upper");
  }
  if (lower == kInf || upper == -kInf) throw InvalidRequest("variable '" + name + "' has empty domain");
  const double start = std::clamp(0.0, lower, upper);
  vars_.push_back(Variable{std::move(name), lower, upper, start, 0.0});
  return num_variables() - 1;
}

void LpModel::check_var(int var) const {
  if (var < 0 || var >= num_variables()) {
    throw InvalidRequest("reference to undeclared variable " + std::to_string(var));
  }
}

int LpModel::add_constraint(LinearExpr expr, Relation relation, double rhs, std::string name) {
  for (const auto& t : expr) {
    check_var(t.var);
    if (!std::isfinite(t.coef)) throw InvalidRequest("non-finite constraint coefficient");
  }
  if (!std::isfinite(rhs)) throw InvalidRequest("non-finite right-hand side");
  // Merge duplicate references so the solver sees one coefficient per column.
  std::sort(expr.begin(), expr.end(), [](const Term& a, const Term& b) { return a.var < b.var; });
  LinearExpr merged;
  for (const auto& t : expr) {
    if (!merged.empty() && merged.back().var == t.var) {
      merged.back().coef += t.coef;
    } else {
      merged.push_back(t);
    }
  }
  std::erase_if(merged, [](const Term& t) { return t.coef == 0.0; });
  rows_.push_back(Constraint{std::move(name), std::move(merged), relation, rhs});
  return num_constraints() - 1;
}

void LpModel::add_objective(int var, double coef) {
  check_var(var);
  if (!std::isfinite(coef)) throw InvalidRequest("non-finite objective coefficient");
  vars_[var].cost += coef;
}

void LpModel::set_start(int var, double value) {
  check_var(var);
  vars_[var].start = std::clamp(value, vars_[var].lower, vars_[var].upper);
}

namespace {

std::string lp_name(const std::string& base, char prefix, int index) {
  if (base.empty()) return prefix + std::to_string(index);
  std::string out = base;
  for (char& ch : out) {
    if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '.')) ch = '_';
  }
  return out;
}

void write_terms(std::ostream& out, const std::vector<std::pair<double, std::string>>& terms) {
  if (terms.empty()) {
    out << " 0";
    return;
  }
  bool first = true;
  for (const auto& [coef, name] : terms) {
    if (coef < 0) {
      out << " - " << -coef << ' ' << name;
    } else {
      out << (first ? " " : " + ") << coef << ' ' << name;
    }
    first = false;
  }
}

}  // namespace

void LpModel::write_lp_format(std::ostream& out) const {
  const auto old_precision = out.precision(17);
  std::vector<std::string> names;
  names.reserve(vars_.size());
  for (int j = 0; j < num_variables(); ++j) names.push_back(lp_name(vars_[j].name, 'x', j));

  out << "Minimize\n obj:";
  std::vector<std::pair<double, std::string>> obj;
  for (int j = 0; j < num_variables(); ++j) {
    if (vars_[j].cost != 0.0) obj.emplace_back(vars_[j].cost, names[j]);
  }
  write_terms(out, obj);
  out << "\nSubject To\n";
  for (int i = 0; i < num_constraints(); ++i) {
    const auto& row = rows_[i];
    out << ' ' << lp_name(row.name, 'c', i) << ':';
    std::vector<std::pair<double, std::string>> terms;
    for (const auto& t : row.expr) terms.emplace_back(t.coef, names[t.var]);
    write_terms(out, terms);
    switch (row.relation) {
      case Relation::LessEqual: out << " <= "; break;
      case Relation::Equal: out << " = "; break;
      case Relation::GreaterEqual: out << " >= "; break;
    }
    out << row.rhs << '\n';
  }
  out << "Bounds\n";
  for (int j = 0; j < num_variables(); ++j) {
    const auto& v = vars_[j];
    if (v.lower == -kInf && v.upper == kInf) {
      out << ' ' << names[j] << " free\n";
    } else if (v.lower == v.upper) {
      out << ' ' << names[j] << " = " << v.lower << '\n';
    } else {
      out << ' ';
      if (v.lower == -kInf) {
        out << "-inf";
      } else {
        out << v.lower;
      }
      out << " <= " << names[j] << " <= ";
      if (v.upper == kInf) {
        out << "+inf";
      } else {
        out << v.upper;
      }
      out << '\n';
    }
  }
  out << "End\n";
  out.precision(old_precision);
}

const char* to_string(Status status) {
  switch (status) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
  }
  return "unknown";
}

AbsObjective encode_abs_cost(LpModel& model, const std::vector<AbsTerm>& terms) {
  for (const auto& t : terms) {
    if (!(t.weight >= 0.0) || !std::isfinite(t.weight)) {
      throw InvalidCost("absolute-value cost weight must be finite and nonnegative");
    }
  }
  AbsObjective handle;
  handle.aux.reserve(terms.size());
  for (const auto& t : terms) {
    if (t.weight == 0.0) {
      handle.aux.push_back(-1);
      continue;
    }
    const double gap = std::abs(model.variable(t.var).start - t.constant);
    const int aux = model.add_variable("abs_" + model.variable(t.var).name, 0.0, kInf);
    model.set_start(aux, gap);
    // t - x >= -c and t + x >= c
    model.add_constraint({{aux, 1.0}, {t.var, -1.0}}, Relation::GreaterEqual, -t.constant);
    model.add_constraint({{aux, 1.0}, {t.var, 1.0}}, Relation::GreaterEqual, t.constant);
    model.add_objective(aux, t.weight);
    handle.aux.push_back(aux);
  }
  return handle;
}

double row_activity(const Constraint& row, const std::vector<double>& values) {
  double a = 0.0;
  for (const auto& t : row.expr) a += t.coef * values[t.var];
  return a;
}

double max_constraint_violation(const LpModel& model, const std::vector<double>& values) {
  if (static_cast<int>(values.size()) != model.num_variables()) {
    throw ShapeError("value vector length does not match the model");
  }
  double worst = 0.0;
  for (int j = 0; j < model.num_variables(); ++j) {
    const auto& v = model.variable(j);
    worst = std::max({worst, v.lower - values[j], values[j] - v.upper});
  }
  for (const auto& row : model.constraints()) {
    const double a = row_activity(row, values);
    switch (row.relation) {
      case Relation::LessEqual: worst = std::max(worst, a - row.rhs); break;
      case Relation::GreaterEqual: worst = std::max(worst, row.rhs - a); break;
      case Relation::Equal: worst = std::max(worst, std::abs(a - row.rhs)); break;
    }
  }
  return worst;
}

}  // namespace gamemod::lp
