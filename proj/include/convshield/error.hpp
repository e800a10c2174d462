#pragma once

#include <stdexcept>
#include <string>

namespace convshield {

// Precondition violations: bad shapes, out-of-range parameters, malformed
// architecture descriptions. The CLI maps these to exit code 2.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Shape incompatibility discovered while running a network.
class ShapeError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw InvalidArgument(message);
}

}  // namespace convshield
