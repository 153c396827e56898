#pragma once

#include <stdexcept>
#include <string>

namespace dicke {

/// Bad argument or malformed state (odd N, out-of-range probability, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Base for failures that happen during an otherwise valid computation.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A figure of merit whose denominator vanishes (xi_d of the vacuum,
/// xi_s of a state with zero mean spin).
class UndefinedMetric : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NoConvergence : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// The posterior became identically zero on the grid.
class NumericalUnderflow : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Requested problem size exceeds what the dense representation can hold.
class ResourceLimit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dicke
