#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gamemod/generate.hpp"
#include "gamemod/types.hpp"

namespace gamemod {

enum class BenchMode { ActionsScaling, HorizonScaling, MarginSweep };

// Which margins a margin sweep varies; the other one is held at 1e-5.
enum class SweepKind { Both, Lambda, Iota };

BenchMode parse_bench_mode(const std::string& name);
std::string to_string(BenchMode mode);
SweepKind parse_sweep_kind(const std::string& name);
std::string to_string(SweepKind kind);

struct BenchmarkConfig {
  BenchMode mode = BenchMode::ActionsScaling;
  // m for actions scaling, H for horizon scaling, exponent i (margins 10^-i)
  // for a margin sweep.
  std::vector<int> sizes;
  int instances = 3;
  std::uint64_t seed = 0;
  SupportKind support = SupportKind::Full;  // actions scaling only
  int states = 10;                          // horizon scaling only
  int actions = 2;                          // horizon scaling only
  SweepKind sweep = SweepKind::Both;
  bool timing = true;

  // Throws InvalidRequest on empty or non-positive sizes or instances < 1.
  void validate() const;
};

// Desk-scale grid, or the large grid when `full` is set.
std::vector<int> default_sizes(BenchMode mode, bool full);

struct BenchRow {
  int size = 0;
  int instances = 0;
  double worst_time_s = 0.0;
  double worst_cost = 0.0;
  bool all_certified = true;
  std::vector<std::string> failures;
};

// Runs every grid point in order. A failing instance marks its row as not
// certified and is recorded in `failures`; the remaining rows still run.
std::vector<BenchRow> run_benchmark(const BenchmarkConfig& config);

// "# key=value ..." config line, then
// size,n_instances,worst_time_s,worst_cost,all_certified rows. Times are
// written as NA when timing is off.
std::string benchmark_csv(const BenchmarkConfig& config, const std::vector<BenchRow>& rows);

// Least-squares c for cost ~ c * size through the origin; `ok` when no row
// exceeds 2 c size.
struct LinearFit {
  double slope = 0.0;
  bool ok = true;
};
LinearFit fit_linear_cost(const std::vector<BenchRow>& rows);

// Least-squares slope of log(time) against log(size) over rows with
// size >= min_size.
double log_log_time_slope(const std::vector<BenchRow>& rows, int min_size);

// The fixed 4x4 margin-sweep instance and its target.
NormalInstance margin_sweep_instance();

}  // namespace gamemod
