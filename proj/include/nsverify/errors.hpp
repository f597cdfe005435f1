#pragma once

#include <stdexcept>
#include <string>

namespace nsverify {

/// Malformed or out-of-range input to an operation.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Missing or inconsistent configuration (unknown keys, unset constants, ...).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Time stepping produced a non-finite state.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(double time, const std::string& what)
      : std::runtime_error(what), time_(time) {}

  /// First sample time at which a non-finite value was seen.
  double time() const noexcept { return time_; }

 private:
  double time_;
};

}  // namespace nsverify
