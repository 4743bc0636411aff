#include <charconv>
#include <fstream>
#include <sstream>

#include "gamemod/errors.hpp"
#include "gamemod/io.hpp"

namespace gamemod::io {

namespace {

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw InvalidRequest(std::string("missing field '") + key + "'");
  return j.at(key);
}

// Drops the sign of negative zero.
double clean(double x) { return x == 0.0 ? 0.0 : x; }

int int_field(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_number_integer()) throw InvalidRequest(std::string("field '") + key + "' must be an integer");
  return v.get<int>();
}

double number(const Json& v, const char* what) {
  if (!v.is_number()) throw InvalidRequest(std::string(what) + " must contain numbers");
  return v.get<double>();
}

const Json& array_of(const Json& j, std::size_t size, const char* what) {
  if (!j.is_array() || j.size() != size) {
    throw ShapeError(std::string(what) + " must be an array of length " + std::to_string(size));
  }
  return j;
}

}  // namespace

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidRequest("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidRequest("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidRequest("cannot write '" + path + "'");
  out << text;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json matrix_to_json(const Eigen::MatrixXd& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(clean(m(i, j)));
    out.push_back(std::move(row));
  }
  return out;
}

Eigen::MatrixXd matrix_from_json(const Json& j, const char* what) {
  if (!j.is_array() || j.empty() || !j[0].is_array() || j[0].empty()) {
    throw ShapeError(std::string(what) + " must be a nonempty array of rows");
  }
  Eigen::MatrixXd m(j.size(), j[0].size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    array_of(j[i], j[0].size(), what);
    for (std::size_t c = 0; c < j[i].size(); ++c) m(i, c) = number(j[i][c], what);
  }
  return m;
}

Json vector_to_json(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(clean(v[i]));
  return out;
}

Eigen::VectorXd vector_from_json(const Json& j, const char* what) {
  if (!j.is_array() || j.empty()) throw ShapeError(std::string(what) + " must be a nonempty array");
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[i] = number(j[i], what);
  return v;
}

Limit limit_from_json(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return number(j.at(key), key);
}

Json limit_to_json(const Limit& x) { return x ? Json(*x) : Json(nullptr); }

MatrixGame game_from_json(const Json& j) {
  return MatrixGame(matrix_from_json(field(j, "payoff"), "payoff"), limit_from_json(j, "bound"));
}

Json to_json(const MatrixGame& game) {
  Json out;
  out["payoff"] = matrix_to_json(game.payoff());
  out["bound"] = limit_to_json(game.bound());
  return out;
}

StrategyProfile profile_from_json(const Json& j) {
  return StrategyProfile(vector_from_json(field(j, "p"), "p"), vector_from_json(field(j, "q"), "q"));
}

Json to_json(const StrategyProfile& profile) {
  Json out;
  out["p"] = vector_to_json(profile.p());
  out["q"] = vector_to_json(profile.q());
  return out;
}

MarkovGame markov_game_from_json(const Json& j) {
  const int horizon = int_field(j, "H");
  const int states = int_field(j, "S");
  const int a1 = int_field(j, "A1");
  const int a2 = int_field(j, "A2");
  if (horizon < 1 || states < 1 || a1 < 1 || a2 < 1) throw ShapeError("H, S, A1 and A2 must be positive");

  const Json& jr = array_of(field(j, "rewards"), horizon, "rewards");
  std::vector<std::vector<Eigen::MatrixXd>> rewards(horizon);
  for (int h = 0; h < horizon; ++h) {
    array_of(jr[h], states, "rewards[h]");
    for (int s = 0; s < states; ++s) rewards[h].push_back(matrix_from_json(jr[h][s], "rewards[h][s]"));
  }

  std::vector<std::vector<std::vector<Eigen::MatrixXd>>> transitions;
  const Json& jt = j.contains("transitions") ? j.at("transitions") : Json::array();
  if (!jt.is_array() || (jt.size() != static_cast<std::size_t>(horizon) &&
                         jt.size() != static_cast<std::size_t>(horizon - 1))) {
    throw ShapeError("transitions must hold H or H - 1 periods");
  }
  for (std::size_t h = 0; h < jt.size(); ++h) {
    array_of(jt[h], states, "transitions[h]");
    std::vector<std::vector<Eigen::MatrixXd>> stage(
        states, std::vector<Eigen::MatrixXd>(states, Eigen::MatrixXd(a1, a2)));
    for (int s = 0; s < states; ++s) {
      array_of(jt[h][s], a1, "transitions[h][s]");
      for (int i = 0; i < a1; ++i) {
        array_of(jt[h][s][i], a2, "transitions[h][s][i]");
        for (int c = 0; c < a2; ++c) {
          const Json& dist = array_of(jt[h][s][i][c], states, "transitions[h][s][i][j]");
          for (int t = 0; t < states; ++t) stage[s][t](i, c) = number(dist[t], "transitions");
        }
      }
    }
    transitions.push_back(std::move(stage));
  }
  return MarkovGame(states, horizon, a1, a2, std::move(rewards), std::move(transitions),
                    vector_from_json(field(j, "initial"), "initial"), limit_from_json(j, "bound"));
}

Json to_json(const MarkovGame& game) {
  Json out;
  out["H"] = game.horizon();
  out["S"] = game.num_states();
  out["A1"] = game.actions1();
  out["A2"] = game.actions2();
  Json rewards = Json::array();
  for (const auto& stage : game.rewards()) {
    Json row = Json::array();
    for (const auto& r : stage) row.push_back(matrix_to_json(r));
    rewards.push_back(std::move(row));
  }
  out["rewards"] = std::move(rewards);
  Json transitions = Json::array();
  for (const auto& stage : game.transitions()) {
    Json js = Json::array();
    for (int s = 0; s < game.num_states(); ++s) {
      Json ji = Json::array();
      for (int i = 0; i < game.actions1(); ++i) {
        Json jj = Json::array();
        for (int c = 0; c < game.actions2(); ++c) {
          Json dist = Json::array();
          for (int t = 0; t < game.num_states(); ++t) dist.push_back(stage[s][t](i, c));
          jj.push_back(std::move(dist));
        }
        ji.push_back(std::move(jj));
      }
      js.push_back(std::move(ji));
    }
    transitions.push_back(std::move(js));
  }
  out["transitions"] = std::move(transitions);
  out["initial"] = vector_to_json(game.initial());
  out["bound"] = limit_to_json(game.bound());
  return out;
}

MarkovPolicy policy_from_json(const Json& j) {
  const Json& jp = field(j, "p");
  const Json& jq = field(j, "q");
  if (!jp.is_array() || jp.empty() || !jp[0].is_array()) throw ShapeError("policy p must be [h][s][...]");
  array_of(jq, jp.size(), "policy q");
  std::vector<std::vector<StrategyProfile>> stages(jp.size());
  for (std::size_t h = 0; h < jp.size(); ++h) {
    array_of(jp[h], jp[0].size(), "policy p[h]");
    array_of(jq[h], jp[0].size(), "policy q[h]");
    for (std::size_t s = 0; s < jp[h].size(); ++s) {
      stages[h].emplace_back(vector_from_json(jp[h][s], "p"), vector_from_json(jq[h][s], "q"));
    }
  }
  return MarkovPolicy(std::move(stages));
}

Json to_json(const MarkovPolicy& policy) {
  Json p = Json::array();
  Json q = Json::array();
  for (const auto& stage : policy.stages()) {
    Json ps = Json::array();
    Json qs = Json::array();
    for (const auto& prof : stage) {
      ps.push_back(vector_to_json(prof.p()));
      qs.push_back(vector_to_json(prof.q()));
    }
    p.push_back(std::move(ps));
    q.push_back(std::move(qs));
  }
  Json out;
  out["p"] = std::move(p);
  out["q"] = std::move(q);
  return out;
}

CostSpec parse_cost(const std::string& name) {
  if (name == "l1") return OneTimeL1{};
  if (name == "forever") return ForeverCost{};
  throw InvalidCost("unknown cost '" + name + "' (expected l1 or forever)");
}

ModificationRequest request_from_json(const Json& j, Target target) {
  ModificationRequest req{std::move(target), {limit_from_json(j, "value_lo"), limit_from_json(j, "value_hi")},
                          limit_from_json(j, "bound")};
  if (j.contains("cost")) {
    if (!j.at("cost").is_string()) throw InvalidCost("cost must be a string");
    req.cost = parse_cost(j.at("cost").get<std::string>());
  }
  if (j.contains("iota")) req.margin_sow = number(j.at("iota"), "iota");
  if (j.contains("lambda")) req.margin_reward = number(j.at("lambda"), "lambda");
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) throw InvalidRequest("seed must be a nonnegative integer");
    req.rng_seed = j.at("seed").get<std::uint64_t>();
  }
  req.validate();
  return req;
}

Json to_json(const UniquenessCertificate& cert) {
  Json out;
  out["valid"] = cert.valid();
  out["game_value"] = clean(cert.game_value);
  out["row_sii_residual"] = cert.row_sii_residual;
  out["col_sii_residual"] = cert.col_sii_residual;
  out["row_sow_gap"] = limit_to_json(cert.row_sow_gap);
  out["col_sow_gap"] = limit_to_json(cert.col_sow_gap);
  out["sigma_min"] = cert.sigma_min;
  out["supports_equal"] = cert.supports_equal;
  out["sii_tol"] = cert.sii_tol;
  out["inv_tol"] = cert.inv_tol;
  return out;
}

Json to_json(const ErpsGame& game) {
  Json out;
  out["matrix"] = matrix_to_json(game.matrix);
  out["normalizer_c"] = game.normalizer_c;
  out["support_size"] = game.k;
  out["row_order"] = game.row_perm;
  out["col_order"] = game.col_perm;
  out["warnings"] = game.warnings;
  return out;
}

Json to_json(const NashEnumeration& nash) {
  Json out;
  out["value"] = clean(nash.value);
  out["unique"] = nash.unique();
  Json rows = Json::array();
  for (const auto& p : nash.row_strategies) rows.push_back(vector_to_json(p));
  Json cols = Json::array();
  for (const auto& q : nash.col_strategies) cols.push_back(vector_to_json(q));
  out["row_strategies"] = std::move(rows);
  out["col_strategies"] = std::move(cols);
  return out;
}

Json to_json(const ModificationResult& result, int states, bool timings) {
  Json out;
  out["certified"] = result.certified();
  out["value"] = clean(result.value);
  out["cost"] = result.cost;
  out["relaxed_cost"] = result.relaxed_cost;
  if (states > 0) out["bellman_residual"] = result.bellman_residual;
  Json stages = Json::array();
  for (std::size_t k = 0; k < result.modified_rewards.size(); ++k) {
    Json st;
    if (states > 0) {
      st["h"] = static_cast<int>(k) / states;
      st["s"] = static_cast<int>(k) % states;
    }
    st["modified"] = matrix_to_json(result.modified_rewards[k]);
    st["relaxed"] = matrix_to_json(result.relaxed_rewards[k]);
    st["value"] = clean(result.stage_values[k]);
    st["lp_value"] = clean(result.lp_stage_values[k]);
    st["epsilon"] = result.perturbations[k];
    st["certificate"] = to_json(result.certificates[k]);
    stages.push_back(std::move(st));
  }
  out["stages"] = std::move(stages);
  out["warnings"] = result.warnings;
  Json stats;
  stats["lp_iterations"] = result.stats.lp_iterations;
  stats["lp_rows"] = result.stats.lp_rows;
  stats["lp_columns"] = result.stats.lp_columns;
  stats["redraws"] = result.stats.redraws;
  if (timings) {
    stats["lp_seconds"] = result.stats.lp_seconds;
    stats["total_seconds"] = result.stats.total_seconds;
  }
  out["stats"] = std::move(stats);
  return out;
}

std::string format_double(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string matrix_to_csv(const Eigen::MatrixXd& m) {
  std::string out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out += ',';
      out += format_double(m(i, j));
    }
    out += '\n';
  }
  return out;
}

}  // namespace gamemod::io
