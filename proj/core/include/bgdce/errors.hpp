#pragma once

#include <stdexcept>
#include <string>

namespace bgdce {

// Caller handed us input that violates a documented precondition.
struct PreconditionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// An internal invariant failed; indicates a bug, not bad input.
struct InvariantError : std::logic_error {
  using std::logic_error::logic_error;
};

// Enumeration exceeded its explicit size cap.
struct CapExceededError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Iterative projection stopped above its violation budget.
struct ProjectionError : std::runtime_error {
  ProjectionError(const std::string& what, double violation)
      : std::runtime_error(what), achieved_violation(violation) {}
  double achieved_violation;
};

}  // namespace bgdce
