#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "gamemod/bench.hpp"
#include "gamemod/errors.hpp"
#include "gamemod/io.hpp"
#include "gamemod/markov.hpp"
#include "gamemod/rap.hpp"

namespace gamemod {

namespace {

constexpr double kHeldMargin = 1e-5;

struct Outcome {
  double seconds = 0.0;
  double cost = 0.0;
  std::string failure;
};

template <class F>
Outcome timed(F&& run) {
  Outcome out;
  const auto start = std::chrono::steady_clock::now();
  try {
    out.cost = run();
  } catch (const Error& e) {
    out.failure = e.what();
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

// Runs rap and accepts the result only if it passes the certificate again.
double certified_normal(const NormalInstance& inst, const ModificationRequest& req) {
  const ModificationResult res = rap(inst.game, req);
  const auto cert = verify_unique_ne(res.modified_rewards[0], inst.target);
  if (!cert.valid()) throw CertificationFailure("output failed re-verification");
  return res.cost;
}

double certified_markov(const MarkovInstance& inst, const ModificationRequest& req) {
  const ModificationResult res = rap_mg(inst.game, req);
  const int states = inst.game.num_states();
  std::vector<std::vector<Eigen::MatrixXd>> rewards(inst.game.horizon());
  for (std::size_t k = 0; k < res.modified_rewards.size(); ++k) {
    rewards[k / states].push_back(res.modified_rewards[k]);
  }
  if (!verify_mpe_unique(inst.game.with_rewards(rewards), inst.target).valid()) {
    throw CertificationFailure("output failed re-verification");
  }
  return res.cost;
}

}  // namespace

BenchMode parse_bench_mode(const std::string& name) {
  if (name == "actions-scaling") return BenchMode::ActionsScaling;
  if (name == "horizon-scaling") return BenchMode::HorizonScaling;
  if (name == "margin-sweep") return BenchMode::MarginSweep;
  throw InvalidRequest("unknown benchmark mode '" + name + "'");
}

std::string to_string(BenchMode mode) {
  switch (mode) {
    case BenchMode::ActionsScaling: return "actions-scaling";
    case BenchMode::HorizonScaling: return "horizon-scaling";
    case BenchMode::MarginSweep: return "margin-sweep";
  }
  return "?";
}

SweepKind parse_sweep_kind(const std::string& name) {
  if (name == "both") return SweepKind::Both;
  if (name == "lambda") return SweepKind::Lambda;
  if (name == "iota") return SweepKind::Iota;
  throw InvalidRequest("unknown sweep '" + name + "' (expected both, lambda or iota)");
}

std::string to_string(SweepKind kind) {
  switch (kind) {
    case SweepKind::Both: return "both";
    case SweepKind::Lambda: return "lambda";
    case SweepKind::Iota: return "iota";
  }
  return "?";
}

void BenchmarkConfig::validate() const {
  if (sizes.empty()) throw InvalidRequest("benchmark needs at least one size");
  for (int s : sizes) {
    if (mode == BenchMode::MarginSweep ? s < 0 : s < 1) {
      throw InvalidRequest("benchmark size " + std::to_string(s) + " is out of range");
    }
  }
  if (instances < 1) throw InvalidRequest("benchmark needs at least one instance per size");
  if (states < 1 || actions < 1) throw InvalidRequest("states and actions must be positive");
}

std::vector<int> default_sizes(BenchMode mode, bool full) {
  const int top = mode == BenchMode::ActionsScaling ? (full ? 512 : 64) : (full ? 512 : 32);
  std::vector<int> out;
  switch (mode) {
    case BenchMode::ActionsScaling:
      for (int m = 2; m <= top; m *= 2) out.push_back(m);
      break;
    case BenchMode::HorizonScaling:
      for (int h = 1; h <= top; h *= 2) out.push_back(h);
      break;
    case BenchMode::MarginSweep:
      for (int i = full ? 0 : 1; i <= (full ? 15 : 4); ++i) out.push_back(i);
      break;
  }
  return out;
}

NormalInstance margin_sweep_instance() {
  Eigen::MatrixXd r(4, 4);
  r << -0.33, -0.03, 0.68, -0.04,
       0.16, -0.43, 0.94, -0.45,
       0.02, 0.85, -0.28, -0.98,
       -0.57, 0.3, -0.12, -0.17;
  Eigen::VectorXd p(4);
  Eigen::VectorXd q(4);
  p << 0.47, 0.53, 0, 0;
  q << 0.42, 0.58, 0, 0;
  return {MatrixGame(r), StrategyProfile(p, q)};
}

std::vector<BenchRow> run_benchmark(const BenchmarkConfig& config) {
  config.validate();
  std::vector<BenchRow> rows;
  for (std::size_t g = 0; g < config.sizes.size(); ++g) {
    const int size = config.sizes[g];
    BenchRow row;
    row.size = size;
    const int count = config.mode == BenchMode::MarginSweep ? 1 : config.instances;
    row.instances = count;
    for (int n = 0; n < count; ++n) {
      const std::uint64_t seed = derive_seed(config.seed, g, n);
      Outcome out;
      switch (config.mode) {
        case BenchMode::ActionsScaling: {
          const NormalInstance inst = generate_random_normal(size, config.support, seed);
          ModificationRequest req{inst.target, {}, std::nullopt};
          req.rng_seed = seed;
          out = timed([&] { return certified_normal(inst, req); });
          break;
        }
        case BenchMode::HorizonScaling: {
          const MarkovInstance inst = generate_random_markov(config.states, config.actions, size, seed);
          ModificationRequest req{inst.target, {}, std::nullopt};
          req.rng_seed = seed;
          out = timed([&] { return certified_markov(inst, req); });
          break;
        }
        case BenchMode::MarginSweep: {
          const NormalInstance inst = margin_sweep_instance();
          const double margin = std::pow(10.0, -size);
          ModificationRequest req{inst.target, {}, std::nullopt};
          req.margin_sow = config.sweep == SweepKind::Lambda ? kHeldMargin : margin;
          req.margin_reward = config.sweep == SweepKind::Iota ? kHeldMargin : margin;
          req.rng_seed = config.seed;
          out = timed([&] { return certified_normal(inst, req); });
          break;
        }
      }
      if (!out.failure.empty()) {
        row.all_certified = false;
        row.failures.push_back("instance " + std::to_string(n) + ": " + out.failure);
        continue;
      }
      row.worst_time_s = std::max(row.worst_time_s, out.seconds);
      row.worst_cost = std::max(row.worst_cost, out.cost);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string benchmark_csv(const BenchmarkConfig& config, const std::vector<BenchRow>& rows) {
  std::ostringstream out;
  out << "# mode=" << to_string(config.mode) << " seed=" << config.seed;
  switch (config.mode) {
    case BenchMode::ActionsScaling:
      out << " support=" << to_string(config.support) << " supports=independent";
      break;
    case BenchMode::HorizonScaling:
      out << " states=" << config.states << " actions=" << config.actions << " support=full";
      break;
    case BenchMode::MarginSweep:
      out << " sweep=" << to_string(config.sweep) << " held_margin=" << io::format_double(kHeldMargin)
          << " size=exponent";
      break;
  }
  out << "\nsize,n_instances,worst_time_s,worst_cost,all_certified\n";
  for (const auto& row : rows) {
    out << row.size << ',' << row.instances << ','
        << (config.timing ? io::format_double(row.worst_time_s) : std::string("NA")) << ','
        << io::format_double(row.worst_cost) << ',' << (row.all_certified ? "true" : "false") << '\n';
  }
  return out.str();
}

LinearFit fit_linear_cost(const std::vector<BenchRow>& rows) {
  double num = 0.0;
  double den = 0.0;
  for (const auto& r : rows) {
    num += r.size * r.worst_cost;
    den += static_cast<double>(r.size) * r.size;
  }
  LinearFit fit;
  fit.slope = den > 0.0 ? num / den : 0.0;
  for (const auto& r : rows) {
    if (r.worst_cost > 2.0 * fit.slope * r.size) fit.ok = false;
  }
  return fit;
}

double log_log_time_slope(const std::vector<BenchRow>& rows, int min_size) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& r : rows) {
    if (r.size < min_size || r.worst_time_s <= 0.0) continue;
    xs.push_back(std::log(r.size));
    ys.push_back(std::log(r.worst_time_s));
  }
  if (xs.size() < 2) return 0.0;
  const double n = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    mx += xs[k] / n;
    my += ys[k] / n;
  }
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxy += (xs[k] - mx) * (ys[k] - my);
    sxx += (xs[k] - mx) * (xs[k] - mx);
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

}  // namespace gamemod
