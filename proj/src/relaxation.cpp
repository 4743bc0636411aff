#include "relaxation.hpp"

namespace gamemod::detail {

void add_siisow_rows(lp::LpModel& model, const std::vector<std::vector<int>>& payoff, int value,
                     const StrategyProfile& target, double iota, const std::string& tag) {
  const int m = target.rows();
  const int n = target.cols();
  const auto& p = target.p();
  const auto& q = target.q();
  for (int i = 0; i < m; ++i) {
    lp::LinearExpr e;
    for (int j = 0; j < n; ++j) {
      if (q[j] > 0.0) e.push_back({payoff[i][j], q[j]});
    }
    e.push_back({value, -1.0});
    if (p[i] > 0.0) {
      model.add_constraint(std::move(e), lp::Relation::Equal, 0.0, tag + "row_sii_" + std::to_string(i));
    } else {
      model.add_constraint(std::move(e), lp::Relation::LessEqual, -iota,
                           tag + "row_sow_" + std::to_string(i));
    }
  }
  for (int j = 0; j < n; ++j) {
    lp::LinearExpr e;
    for (int i = 0; i < m; ++i) {
      if (p[i] > 0.0) e.push_back({payoff[i][j], p[i]});
    }
    e.push_back({value, -1.0});
    if (q[j] > 0.0) {
      model.add_constraint(std::move(e), lp::Relation::Equal, 0.0, tag + "col_sii_" + std::to_string(j));
    } else {
      model.add_constraint(std::move(e), lp::Relation::GreaterEqual, iota,
                           tag + "col_sow_" + std::to_string(j));
    }
  }
}

bool open_meets_closed(double a, double b, const Limit& lo, const Limit& hi) {
  const double l = lo ? *lo : -lp::kInf;
  const double h = hi ? *hi : lp::kInf;
  return a < b && l < b && h > a && l <= h;
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) out += (out.empty() ? "" : "; ") + p;
  return out;
}

}  // namespace gamemod::detail
