#pragma once

#include <string>
#include <vector>

#include "gamemod/io.hpp"
#include "gamemod/result.hpp"

namespace gamemod {

struct GoldenCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct GoldenOutcome {
  std::string file;
  std::string name;
  std::vector<GoldenCheck> checks;
  ModificationResult result;
  double seconds = 0.0;

  bool passed() const;
};

// Runs one example file: {"name", "game", "target", "request", "expect"}.
// Recognized expectations: value {value, tol}, cost {value, tol}, max_cost,
// entry / relaxed_entry {row, col, value, tol}, original_unique,
// modified_unique (enumeration oracle) and max_seconds. A modification that
// throws yields a single failed "modify" check.
GoldenOutcome run_golden_example(const io::Json& spec, const std::string& file = {});

// Every *.json file in `dir`, in file-name order.
std::vector<GoldenOutcome> run_golden_examples(const std::string& dir);

}  // namespace gamemod
