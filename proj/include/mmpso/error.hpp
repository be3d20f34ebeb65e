#pragma once

#include <stdexcept>
#include <string>

namespace mmpso {

/// Caller broke a precondition (wrong dimension, invalid parameter).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical failure inside a solver step (non-finite state, CFL breach, vanished mass).
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Configuration file could not be parsed or failed validation.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mmpso
