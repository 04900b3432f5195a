#pragma once

#include <stdexcept>
#include <string>

namespace horton {

/// Argument outside the mathematical domain of an operation.
struct DomainError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A configured size cap was exceeded.
struct CapacityError : std::length_error {
  using std::length_error::length_error;
};

/// Loss of precision, truncation failure or a root finder without a bracket.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Input violates the structural hypotheses of an operation.
struct StructuralError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Broken internal consistency check.
struct ConsistencyError : std::logic_error {
  using std::logic_error::logic_error;
};

}  // namespace horton
