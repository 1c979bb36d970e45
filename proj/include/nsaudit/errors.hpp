#pragma once

#include <stdexcept>
#include <string>

namespace nsaudit {

// Violated precondition or invariant on an input value.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Configuration, usage and file-format problems (CLI exit code 1).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical failure (CLI exit code 2).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericalBlowup : public NumericalError {
 public:
  explicit NumericalBlowup(double t)
      : NumericalError("non-finite spectral coefficient at t = " + std::to_string(t)),
        time_(t) {}
  double time() const { return time_; }

 private:
  double time_;
};

class NotContractive : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace nsaudit
