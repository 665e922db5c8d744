#pragma once

#include <stdexcept>
#include <string>

namespace rfi {

/// Raised for invalid arguments: bad probabilities, dimension mismatches,
/// malformed configuration values.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a linear system or matrix inverse is numerically singular.
class SingularityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised on file read/write failures; the message names the path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rfi
