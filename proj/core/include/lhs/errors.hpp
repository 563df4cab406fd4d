#pragma once

#include <stdexcept>
#include <string>

namespace lhs {

// Raised when a time integration cannot continue (non-finite values, unit-norm drift).
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double time)
      : std::runtime_error(what), time_(time) {}

  double time() const noexcept { return time_; }

 private:
  double time_;
};

// Raised when a solver is asked for a problem size it does not support.
class CapabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when an experiment configuration is invalid or its hypotheses are not met.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The configuration is well formed but the experiment's hypotheses (admissibility) fail.
class InadmissibleError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

}  // namespace lhs
