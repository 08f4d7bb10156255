#pragma once

#include <stdexcept>
#include <string>

namespace explab {

// Shared error taxonomy. Everything thrown by the library derives from
// Error so the CLI boundary can catch a single type.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Shape mismatch between operands.
struct DimensionError : Error {
  using Error::Error;
};

// Non-finite or otherwise out-of-domain input.
struct InvalidInputError : Error {
  using Error::Error;
};

// Cholesky pivot failure: the matrix is not positive definite.
struct NotSpdError : Error {
  using Error::Error;
};

// A rank-one downdate or similar operation hit a non-positive denominator.
struct DegeneracyError : Error {
  using Error::Error;
};

// An API was driven outside its stated contract (e.g. stepping a finished
// episode).
struct ContractViolation : Error {
  using Error::Error;
};

// Graph queries on disconnected structure (no path start -> goal).
struct UnreachableError : Error {
  using Error::Error;
};

// Non-finite loss or gradient during training.
struct TrainingDivergence : Error {
  using Error::Error;
};

// Bad configuration file or override.
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace explab
