#include <algorithm>
#include <cmath>
#include <numeric>

#include "gamemod/errors.hpp"
#include "gamemod/generate.hpp"

namespace gamemod {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Eigen::MatrixXd uniform_matrix(std::mt19937_64& rng, int m, int n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd r(m, n);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) r(i, j) = u(rng);
  }
  return r;
}

}  // namespace

SupportKind parse_support_kind(const std::string& name) {
  if (name == "pure") return SupportKind::Pure;
  if (name == "half") return SupportKind::Half;
  if (name == "full") return SupportKind::Full;
  throw InvalidRequest("unknown support kind '" + name + "' (expected pure, half or full)");
}

std::string to_string(SupportKind kind) {
  switch (kind) {
    case SupportKind::Pure: return "pure";
    case SupportKind::Half: return "half";
    case SupportKind::Full: return "full";
  }
  return "?";
}

int support_size(SupportKind kind, int m) {
  switch (kind) {
    case SupportKind::Pure: return 1;
    case SupportKind::Half: return std::max(1, m / 2);
    case SupportKind::Full: return m;
  }
  return m;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t grid, std::uint64_t index) {
  return splitmix64(splitmix64(splitmix64(seed) ^ grid) ^ index);
}

Eigen::VectorXd random_dirichlet(std::mt19937_64& rng, int n, int k) {
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  // Partial Fisher-Yates; std::shuffle's draws are implementation-defined.
  for (int a = 0; a < k; ++a) {
    const int b = a + static_cast<int>(rng() % static_cast<std::uint64_t>(n - a));
    std::swap(idx[a], idx[b]);
  }
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  double total = 0.0;
  for (int a = 0; a < k; ++a) {
    // Exponential(1) by inversion, u in (0, 1].
    const double u = (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
    v[idx[a]] = -std::log(u);
    total += v[idx[a]];
  }
  return v / total;
}

NormalInstance generate_random_normal(int m, SupportKind kind, std::uint64_t seed) {
  if (m < 1) throw InvalidRequest("game size must be positive");
  std::mt19937_64 rng(seed);
  const Eigen::MatrixXd payoff = uniform_matrix(rng, m, m);
  const int k = support_size(kind, m);
  Eigen::VectorXd p = random_dirichlet(rng, m, k);
  Eigen::VectorXd q = random_dirichlet(rng, m, k);
  return {MatrixGame(payoff), StrategyProfile(std::move(p), std::move(q))};
}

MarkovInstance generate_random_markov(int num_states, int actions, int horizon, std::uint64_t seed) {
  if (num_states < 1 || actions < 1 || horizon < 1) {
    throw InvalidRequest("states, actions and horizon must be positive");
  }
  std::mt19937_64 rng(seed);
  std::vector<std::vector<Eigen::MatrixXd>> rewards(horizon);
  for (auto& stage : rewards) {
    for (int s = 0; s < num_states; ++s) stage.push_back(uniform_matrix(rng, actions, actions));
  }
  std::vector<std::vector<std::vector<Eigen::MatrixXd>>> transitions(
      std::max(0, horizon - 1),
      std::vector<std::vector<Eigen::MatrixXd>>(
          num_states, std::vector<Eigen::MatrixXd>(num_states, Eigen::MatrixXd(actions, actions))));
  for (auto& stage : transitions) {
    for (auto& from : stage) {
      for (int i = 0; i < actions; ++i) {
        for (int j = 0; j < actions; ++j) {
          const Eigen::VectorXd d = random_dirichlet(rng, num_states, num_states);
          for (int t = 0; t < num_states; ++t) from[t](i, j) = d[t];
        }
      }
    }
  }
  std::vector<std::vector<StrategyProfile>> policy(horizon);
  for (auto& stage : policy) {
    for (int s = 0; s < num_states; ++s) {
      Eigen::VectorXd p = random_dirichlet(rng, actions, actions);
      Eigen::VectorXd q = random_dirichlet(rng, actions, actions);
      stage.emplace_back(std::move(p), std::move(q));
    }
  }
  const Eigen::VectorXd initial = Eigen::VectorXd::Constant(num_states, 1.0 / num_states);
  return {MarkovGame(num_states, horizon, actions, actions, std::move(rewards), std::move(transitions),
                     initial),
          MarkovPolicy(std::move(policy))};
}

}  // namespace gamemod
