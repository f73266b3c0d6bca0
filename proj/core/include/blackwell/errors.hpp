#pragma once

#include <stdexcept>
#include <string>

namespace blackwell {

// Shape or index mismatch between two objects that must agree.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Invalid value for a domain type (bad probability vector, empty set, ...).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A group with zero mass was asked for a conditional quantity.
class DegenerateGroupError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Numerical solver failed to converge or produced an inconsistent state.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double residual = 0.0)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

// A brute-force enumeration would exceed its size guard.
class GuardError : public std::runtime_error {
 public:
  GuardError(const std::string& what, double estimated_size)
      : std::runtime_error(what), estimated_size_(estimated_size) {}
  double estimated_size() const { return estimated_size_; }

 private:
  double estimated_size_;
};

// Experiment configuration could not be parsed or validated.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace blackwell
