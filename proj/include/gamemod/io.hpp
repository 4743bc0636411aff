#pragma once

#include <Eigen/Dense>

#include <json.hpp>

#include <string>

#include "gamemod/erps.hpp"
#include "gamemod/result.hpp"
#include "gamemod/types.hpp"
#include "gamemod/uniqueness.hpp"

namespace gamemod::io {

using Json = nlohmann::ordered_json;

// Reads a whole file as JSON. Throws InvalidRequest on I/O or syntax errors.
Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

// Pretty-printed with a trailing newline.
std::string dump(const Json& j);

Json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const Json& j, const char* what);
Json vector_to_json(const Eigen::VectorXd& v);
Eigen::VectorXd vector_from_json(const Json& j, const char* what);

Limit limit_from_json(const Json& j, const char* key);
Json limit_to_json(const Limit& x);

// {"payoff": [[...]], "bound": number|null}
MatrixGame game_from_json(const Json& j);
Json to_json(const MatrixGame& game);

// {"p": [...], "q": [...]}
StrategyProfile profile_from_json(const Json& j);
Json to_json(const StrategyProfile& profile);

// {"H", "S", "A1", "A2", "rewards": [h][s][[...]],
//  "transitions": [h][s][i][j][s'], "initial": [...], "bound"}
MarkovGame markov_game_from_json(const Json& j);
Json to_json(const MarkovGame& game);

// {"p": [h][s][...], "q": [h][s][...]}
MarkovPolicy policy_from_json(const Json& j);
Json to_json(const MarkovPolicy& policy);

// Cost names "l1" and "forever".
CostSpec parse_cost(const std::string& name);

// {"value_lo", "value_hi", "bound", "cost", "iota", "lambda", "seed"}; every
// field is optional and defaults as in ModificationRequest.
ModificationRequest request_from_json(const Json& j, Target target);

Json to_json(const UniquenessCertificate& cert);
Json to_json(const ErpsGame& game);
Json to_json(const NashEnumeration& nash);

// `states` > 0 labels each stage with its (h, s); timing fields are written
// only when `timings` is set so that output is reproducible.
Json to_json(const ModificationResult& result, int states, bool timings);

// One row per line, comma separated, shortest round-trip formatting.
std::string matrix_to_csv(const Eigen::MatrixXd& m);

// Shortest decimal that parses back to the same double.
std::string format_double(double x);

}  // namespace gamemod::io
