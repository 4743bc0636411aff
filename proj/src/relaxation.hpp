#pragma once

// Pieces shared by the normal-form and Markov relaxed programs.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "gamemod/lp.hpp"
#include "gamemod/types.hpp"

namespace gamemod::detail {

// SII equalities and SOW rows (margin iota) for the stage payoff whose
// entries are the LP variables `payoff[i][j]` and whose value is `value`.
void add_siisow_rows(lp::LpModel& model, const std::vector<std::vector<int>>& payoff, int value,
                     const StrategyProfile& target, double iota, const std::string& tag);

// Uniform draws on [-lambda, lambda] \ {0} from a seeded 64-bit Mersenne
// Twister, using the top 53 bits of each output.
class PerturbationStream {
 public:
  explicit PerturbationStream(std::uint64_t seed) : engine_(seed) {}

  double next(double lambda) {
    while (true) {
      const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
      const double eps = -lambda + 2.0 * lambda * u;
      if (eps != 0.0) return eps;
    }
  }

 private:
  std::mt19937_64 engine_;
};

// Does the open interval (a, b) meet the closed interval [lo, hi]?
bool open_meets_closed(double a, double b, const Limit& lo, const Limit& hi);

std::string join(const std::vector<std::string>& parts);

// Lower/upper reward bounds of the relaxed program.
inline double reward_lower(const Limit& bound, double lambda) {
  return bound ? -*bound + lambda : -lp::kInf;
}
inline double reward_upper(const Limit& bound, double lambda) {
  return bound ? *bound - lambda : lp::kInf;
}

}  // namespace gamemod::detail
