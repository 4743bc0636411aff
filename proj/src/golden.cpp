#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <sstream>

#include "gamemod/errors.hpp"
#include "gamemod/golden.hpp"
#include "gamemod/rap.hpp"
#include "gamemod/uniqueness.hpp"

namespace gamemod {

namespace {

std::string describe(double actual, const std::string& relation, double expected) {
  std::ostringstream out;
  out << io::format_double(actual) << ' ' << relation << ' ' << io::format_double(expected);
  return out.str();
}

GoldenCheck near(const std::string& name, double actual, const io::Json& want) {
  const double value = want.at("value").get<double>();
  const double tol = want.at("tol").get<double>();
  return {name, std::abs(actual - value) <= tol,
          describe(actual, "vs", value) + " (tol " + io::format_double(tol) + ")"};
}

}  // namespace

bool GoldenOutcome::passed() const {
  return !checks.empty() &&
         std::all_of(checks.begin(), checks.end(), [](const GoldenCheck& c) { return c.passed; });
}

GoldenOutcome run_golden_example(const io::Json& spec, const std::string& file) {
  GoldenOutcome out;
  out.file = file;
  out.name = spec.value("name", file);
  const MatrixGame game = io::game_from_json(spec.at("game"));
  const StrategyProfile target = io::profile_from_json(spec.at("target"));
  const ModificationRequest req =
      io::request_from_json(spec.contains("request") ? spec.at("request") : io::Json::object(), target);
  const io::Json& expect = spec.contains("expect") ? spec.at("expect") : io::Json::object();

  const auto start = std::chrono::steady_clock::now();
  try {
    out.result = rap(game, req);
  } catch (const Error& e) {
    out.checks.push_back({"modify", false, e.what()});
    return out;
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const ModificationResult& res = out.result;
  const Eigen::MatrixXd& modified = res.modified_rewards[0];

  out.checks.push_back({"certified", res.certified(), res.certified() ? "valid" : "invalid"});
  if (expect.contains("value")) out.checks.push_back(near("value", res.value, expect.at("value")));
  if (expect.contains("cost")) out.checks.push_back(near("cost", res.cost, expect.at("cost")));
  if (expect.contains("max_cost")) {
    const double cap = expect.at("max_cost").get<double>();
    out.checks.push_back({"max_cost", res.cost <= cap, describe(res.cost, "<=", cap)});
  }
  for (const char* key : {"entry", "relaxed_entry"}) {
    if (!expect.contains(key)) continue;
    const auto& e = expect.at(key);
    const Eigen::MatrixXd& m = std::string(key) == "entry" ? modified : res.relaxed_rewards[0];
    out.checks.push_back(near(key, m(e.at("row").get<int>(), e.at("col").get<int>()), e));
  }
  if (expect.contains("original_unique")) {
    const bool want = expect.at("original_unique").get<bool>();
    const auto nash = enumerate_nash(game.payoff());
    out.checks.push_back({"original_unique", nash.unique() == want,
                          std::to_string(nash.row_strategies.size()) + " x " +
                              std::to_string(nash.col_strategies.size()) + " extreme strategies"});
  }
  if (expect.contains("modified_unique")) {
    const bool want = expect.at("modified_unique").get<bool>();
    const bool unique = enumerate_nash(modified).unique_equals(target);
    out.checks.push_back({"modified_unique", unique == want,
                          unique ? "target is the only equilibrium" : "oracle disagrees"});
  }
  if (expect.contains("max_seconds")) {
    const double cap = expect.at("max_seconds").get<double>();
    out.checks.push_back({"max_seconds", out.seconds < cap, describe(out.seconds, "<", cap)});
  }
  return out;
}

std::vector<GoldenOutcome> run_golden_examples(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw InvalidRequest("golden directory '" + dir + "' not found");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<GoldenOutcome> out;
  for (const auto& f : files) {
    out.push_back(run_golden_example(io::read_json_file(f.string()), f.filename().string()));
  }
  return out;
}

}  // namespace gamemod
