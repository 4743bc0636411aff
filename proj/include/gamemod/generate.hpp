#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "gamemod/types.hpp"

namespace gamemod {

enum class SupportKind { Pure, Half, Full };

SupportKind parse_support_kind(const std::string& name);
std::string to_string(SupportKind kind);

// Support size for an m-action player: 1, max(1, m / 2) or m.
int support_size(SupportKind kind, int m);

// Independent stream seed for instance `index` of grid point `grid`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t grid, std::uint64_t index);

// Dirichlet(1, ..., 1) on k coordinates of a length-n vector, chosen
// uniformly without replacement.
Eigen::VectorXd random_dirichlet(std::mt19937_64& rng, int n, int k);

struct NormalInstance {
  MatrixGame game;
  StrategyProfile target;
};

// Uniform[-1, 1] payoffs and a Dirichlet target; row and column supports are
// drawn independently with the same size.
NormalInstance generate_random_normal(int m, SupportKind kind, std::uint64_t seed);

struct MarkovInstance {
  MarkovGame game;
  MarkovPolicy target;
};

// Uniform[-1, 1] stage rewards, Dirichlet transitions per (h, s, i, j),
// full-support Dirichlet stage targets, uniform initial distribution.
MarkovInstance generate_random_markov(int num_states, int actions, int horizon, std::uint64_t seed);

}  // namespace gamemod
