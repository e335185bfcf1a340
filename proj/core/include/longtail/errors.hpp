#pragma once

#include <stdexcept>
#include <string>

namespace longtail {

/// Raised when a caller-supplied parameter violates a model constraint
/// (memory parameter outside its admissible interval, non-positive scale, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical routine cannot reach its requested accuracy.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace longtail
