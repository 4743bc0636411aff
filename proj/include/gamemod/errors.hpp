#pragma once

#include <stdexcept>
#include <string>

namespace gamemod {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Dimension mismatch between a game and a strategy, policy or weight table.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Payoff matrix or Markov game failing its invariants (non-finite entries,
// out-of-bound rewards, bad transition rows).
class InvalidGame : public Error {
 public:
  using Error::Error;
};

class InvalidStrategy : public Error {
 public:
  using Error::Error;
};

class UnequalSupports : public Error {
 public:
  using Error::Error;
};

class InvalidRequest : public Error {
 public:
  using Error::Error;
};

class InvalidCost : public Error {
 public:
  using Error::Error;
};

class InfeasibleRequest : public Error {
 public:
  using Error::Error;
};

class CertificationFailure : public Error {
 public:
  using Error::Error;
};

class SolverFailure : public Error {
 public:
  using Error::Error;
};

// Breakdown inside the simplex backend (singular basis, lost feasibility).
class NumericalFailure : public SolverFailure {
 public:
  using SolverFailure::SolverFailure;
};

class DimensionTooLarge : public Error {
 public:
  using Error::Error;
};

}  // namespace gamemod
