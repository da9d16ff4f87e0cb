#pragma once

#include <stdexcept>

namespace spgm {

// Bad data handed to an operation: non-finite points, mismatched dimensions,
// negative regularization weights.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Algorithm parameters outside their admissible range (gamma, M, Phi0, ...).
class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// prox_exact was asked for a psi without a closed form; use prox_inexact_sgd.
class UnsupportedProx : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A diagnostic refused to run (e.g. too few Monte Carlo draws).
class InsufficientSamples : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace spgm
