#pragma once

#include <stdexcept>
#include <string>

namespace acd {

// A caller-supplied value violates an operation's precondition.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The stalling construction could not produce a legal, near-ideal update.
// Distinct from the statistical failures the adversary monitors.
class ConstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace acd
