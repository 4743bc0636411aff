// gamemod: command-line front end for zero-sum game modification.
//
// Exit codes: 0 success, 1 infeasible request, 2 certification failure,
// 3 invalid input or solver error.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "gamemod/bench.hpp"
#include "gamemod/erps.hpp"
#include "gamemod/errors.hpp"
#include "gamemod/golden.hpp"
#include "gamemod/io.hpp"
#include "gamemod/markov.hpp"
#include "gamemod/rap.hpp"
#include "gamemod/uniqueness.hpp"

#ifndef GAMEMOD_DATA_DIR
#define GAMEMOD_DATA_DIR "data"
#endif

namespace {

using gamemod::io::Json;

constexpr int kExitInfeasible = 1;
constexpr int kExitUncertified = 2;
constexpr int kExitError = 3;

struct RequestFlags {
  std::string game;
  std::string target;
  std::optional<double> value_lo;
  std::optional<double> value_hi;
  std::optional<double> bound;
  std::string cost = "l1";
  double iota = gamemod::kDefaultSowMargin;
  double lambda = gamemod::kDefaultRewardMargin;
  std::uint64_t seed = 0;
  std::string out;
  bool timings = false;
};

void add_request_flags(CLI::App* cmd, RequestFlags& f, const char* target_help) {
  cmd->add_option("--game", f.game, "game JSON file")->required();
  cmd->add_option("--target", f.target, target_help)->required();
  cmd->add_option("--value-lo", f.value_lo, "lower end of the value range (default unbounded)");
  cmd->add_option("--value-hi", f.value_hi, "upper end of the value range (default unbounded)");
  cmd->add_option("--bound", f.bound, "payoff bound b (default: the game's bound)");
  cmd->add_option("--cost", f.cost, "l1 or forever")->check(CLI::IsMember({"l1", "forever"}));
  cmd->add_option("--iota", f.iota, "switch-out margin");
  cmd->add_option("--lambda", f.lambda, "reward-bound margin and perturbation half-width");
  cmd->add_option("--seed", f.seed, "perturbation seed");
  cmd->add_option("--out", f.out, "output file (default stdout)");
  cmd->add_flag("--timings", f.timings, "include wall-clock timings in the output");
}

gamemod::ModificationRequest make_request(const RequestFlags& f, gamemod::Target target,
                                          const gamemod::Limit& game_bound) {
  gamemod::ModificationRequest req{std::move(target), {f.value_lo, f.value_hi},
                                   f.bound ? f.bound : game_bound};
  req.cost = gamemod::io::parse_cost(f.cost);
  req.margin_sow = f.iota;
  req.margin_reward = f.lambda;
  req.rng_seed = f.seed;
  return req;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
  } else {
    gamemod::io::write_text_file(path, text);
  }
}

int modify_normal(const RequestFlags& f) {
  const gamemod::MatrixGame game = gamemod::io::game_from_json(gamemod::io::read_json_file(f.game));
  const auto target = gamemod::io::profile_from_json(gamemod::io::read_json_file(f.target));
  const auto req = make_request(f, target, game.bound());
  for (const auto& note : gamemod::check_feasibility_normal(req, game.rows(), game.cols()).notes) {
    std::cerr << "note: " << note << "\n";
  }
  const auto res = gamemod::rap(game, req);
  emit(f.out, gamemod::io::dump(gamemod::io::to_json(res, 0, f.timings)));
  return 0;
}

int modify_markov(const RequestFlags& f) {
  const gamemod::MarkovGame game = gamemod::io::markov_game_from_json(gamemod::io::read_json_file(f.game));
  const auto policy = gamemod::io::policy_from_json(gamemod::io::read_json_file(f.target));
  const auto req = make_request(f, policy, game.bound());
  const auto report = gamemod::check_feasibility_markov(req, game.actions1(), game.actions2(),
                                                        game.horizon(), game.num_states());
  for (const auto& note : report.notes) std::cerr << "note: " << note << "\n";
  const auto res = gamemod::rap_mg(game, req);
  emit(f.out, gamemod::io::dump(gamemod::io::to_json(res, game.num_states(), f.timings)));
  return 0;
}

int verify(const std::string& game_path, const std::string& target_path, bool markov,
           const std::string& out) {
  const Json jg = gamemod::io::read_json_file(game_path);
  const Json jt = gamemod::io::read_json_file(target_path);
  Json result;
  bool valid = false;
  if (markov) {
    const auto game = gamemod::io::markov_game_from_json(jg);
    const auto ver = gamemod::verify_mpe_unique(game, gamemod::io::policy_from_json(jt));
    valid = ver.valid();
    result["valid"] = valid;
    result["value"] = ver.value;
    Json stages = Json::array();
    for (std::size_t k = 0; k < ver.certificates.size(); ++k) {
      Json st;
      st["h"] = static_cast<int>(k) / game.num_states();
      st["s"] = static_cast<int>(k) % game.num_states();
      st["value"] = ver.decomposition.values[k / game.num_states()][k % game.num_states()];
      st["certificate"] = gamemod::io::to_json(ver.certificates[k]);
      stages.push_back(std::move(st));
    }
    result["stages"] = std::move(stages);
  } else {
    const auto game = gamemod::io::game_from_json(jg);
    const auto cert = gamemod::verify_unique_ne(game.payoff(), gamemod::io::profile_from_json(jt));
    valid = cert.valid();
    result = gamemod::io::to_json(cert);
  }
  emit(out, gamemod::io::dump(result));
  return valid ? 0 : kExitUncertified;
}

int erps(const std::string& target_path, const std::string& format, const std::string& out) {
  const auto g = gamemod::build_erps(gamemod::io::profile_from_json(gamemod::io::read_json_file(target_path)));
  for (const auto& w : g.warnings) std::cerr << "warning: " << w << "\n";
  emit(out, format == "csv" ? gamemod::io::matrix_to_csv(g.matrix) : gamemod::io::dump(gamemod::io::to_json(g)));
  return 0;
}

int oracle(const std::string& game_path, int max_dim, const std::string& out) {
  const auto game = gamemod::io::game_from_json(gamemod::io::read_json_file(game_path));
  emit(out, gamemod::io::dump(gamemod::io::to_json(gamemod::enumerate_nash(game, max_dim))));
  return 0;
}

struct BenchFlags {
  std::string mode = "actions-scaling";
  std::vector<int> sizes;
  int instances = 3;
  std::uint64_t seed = 0;
  std::string support = "full";
  int states = 10;
  int actions = 2;
  std::string sweep = "both";
  bool full = false;
  bool no_timing = false;
  std::string out;
};

int bench(const BenchFlags& f) {
  gamemod::BenchmarkConfig config;
  config.mode = gamemod::parse_bench_mode(f.mode);
  config.sizes = f.sizes.empty() ? gamemod::default_sizes(config.mode, f.full) : f.sizes;
  config.instances = f.instances;
  config.seed = f.seed;
  config.support = gamemod::parse_support_kind(f.support);
  config.states = f.states;
  config.actions = f.actions;
  config.sweep = gamemod::parse_sweep_kind(f.sweep);
  config.timing = !f.no_timing;
  const auto rows = gamemod::run_benchmark(config);
  emit(f.out, gamemod::benchmark_csv(config, rows));
  bool ok = true;
  for (const auto& row : rows) {
    for (const auto& msg : row.failures) std::cerr << "size " << row.size << ": " << msg << "\n";
    ok = ok && row.all_certified;
  }
  return ok ? 0 : kExitUncertified;
}

int golden(const std::string& dir, bool timings) {
  const auto outcomes = gamemod::run_golden_examples(dir);
  bool ok = true;
  for (const auto& o : outcomes) {
    std::cout << (o.passed() ? "PASS " : "FAIL ") << o.name;
    if (timings) std::cout << " (" << gamemod::io::format_double(o.seconds) << " s)";
    std::cout << "\n";
    for (const auto& c : o.checks) {
      if (c.name == "max_seconds" && !timings) {
        std::cout << "  " << (c.passed ? "ok   " : "FAIL ") << c.name << "\n";
        continue;
      }
      std::cout << "  " << (c.passed ? "ok   " : "FAIL ") << c.name << ": " << c.detail << "\n";
    }
    ok = ok && o.passed();
  }
  return ok ? 0 : kExitUncertified;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Modify zero-sum games so that a chosen strategy profile is the unique equilibrium.\n"
               "Mixing probabilities at or below 1e-12 are treated as zero."};
  app.require_subcommand(1);

  RequestFlags normal;
  auto* cmd_normal = app.add_subcommand("modify-normal", "modify a matrix game");
  add_request_flags(cmd_normal, normal, "target profile JSON {\"p\": [...], \"q\": [...]}");

  RequestFlags markov;
  auto* cmd_markov = app.add_subcommand("modify-markov", "modify a finite-horizon Markov game");
  add_request_flags(cmd_markov, markov, "target policy JSON {\"p\": [h][s][...], \"q\": [h][s][...]}");

  std::string v_game;
  std::string v_target;
  std::string v_out;
  bool v_markov = false;
  auto* cmd_verify = app.add_subcommand("verify", "certify that a profile or policy is the unique equilibrium");
  cmd_verify->add_option("--game", v_game, "game JSON file")->required();
  cmd_verify->add_option("--target", v_target, "profile or policy JSON file")->required();
  cmd_verify->add_flag("--markov", v_markov, "inputs are a Markov game and policy");
  cmd_verify->add_option("--out", v_out, "output file (default stdout)");

  std::string e_target;
  std::string e_format = "json";
  std::string e_out;
  auto* cmd_erps = app.add_subcommand("erps", "build the extended rock-paper-scissors game of a profile");
  cmd_erps->add_option("--target", e_target, "profile JSON file")->required();
  cmd_erps->add_option("--format", e_format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  cmd_erps->add_option("--out", e_out, "output file (default stdout)");

  std::string o_game;
  std::string o_out;
  int o_max_dim = gamemod::kDefaultOracleMaxDim;
  auto* cmd_oracle = app.add_subcommand("oracle", "enumerate the equilibria of a small matrix game");
  cmd_oracle->add_option("--game", o_game, "game JSON file")->required();
  cmd_oracle->add_option("--max-dim", o_max_dim, "largest action count to enumerate");
  cmd_oracle->add_option("--out", o_out, "output file (default stdout)");

  BenchFlags b;
  auto* cmd_bench = app.add_subcommand("bench", "run a scaling or margin benchmark and write CSV");
  cmd_bench->add_option("--mode", b.mode, "actions-scaling, horizon-scaling or margin-sweep")
      ->check(CLI::IsMember({"actions-scaling", "horizon-scaling", "margin-sweep"}));
  cmd_bench->add_option("--sizes", b.sizes, "grid (m, H or margin exponent); default per mode");
  cmd_bench->add_option("--instances", b.instances, "instances per grid point");
  cmd_bench->add_option("--seed", b.seed, "base seed");
  cmd_bench->add_option("--support", b.support, "pure, half or full (actions scaling)")
      ->check(CLI::IsMember({"pure", "half", "full"}));
  cmd_bench->add_option("--states", b.states, "states (horizon scaling)");
  cmd_bench->add_option("--actions", b.actions, "actions per player (horizon scaling)");
  cmd_bench->add_option("--sweep", b.sweep, "both, lambda or iota (margin sweep)")
      ->check(CLI::IsMember({"both", "lambda", "iota"}));
  cmd_bench->add_flag("--full", b.full, "use the large grid (m, H up to 512; exponents 0..15)");
  cmd_bench->add_flag("--no-timing", b.no_timing, "write NA for times so output is reproducible");
  cmd_bench->add_option("--out", b.out, "CSV file (default stdout)");

  std::string g_dir = std::string(GAMEMOD_DATA_DIR) + "/golden";
  bool g_timings = false;
  auto* cmd_golden = app.add_subcommand("golden", "run the bundled worked examples");
  cmd_golden->add_option("--dir", g_dir, "example directory");
  cmd_golden->add_flag("--timings", g_timings, "print run times");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*cmd_normal) return modify_normal(normal);
    if (*cmd_markov) return modify_markov(markov);
    if (*cmd_verify) return verify(v_game, v_target, v_markov, v_out);
    if (*cmd_erps) return erps(e_target, e_format, e_out);
    if (*cmd_oracle) return oracle(o_game, o_max_dim, o_out);
    if (*cmd_bench) return bench(b);
    if (*cmd_golden) return golden(g_dir, g_timings);
  } catch (const gamemod::InfeasibleRequest& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const gamemod::CertificationFailure& e) {
    std::cerr << "certification failed: " << e.what() << "\n";
    return kExitUncertified;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
