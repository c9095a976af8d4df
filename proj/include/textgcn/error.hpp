#pragma once

#include <stdexcept>
#include <string>

namespace textgcn {

/// Thrown for malformed input files. The message names the offending line or row.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when arguments violate an operation's preconditions.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when a training objective becomes non-finite.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace textgcn
