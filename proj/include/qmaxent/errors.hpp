#pragma once

#include <stdexcept>
#include <string>

namespace qmaxent {

/// Base class for all qmaxent errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands have incompatible or unsupported dimensions.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Argument outside an operation's admissible range.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A type invariant failed at construction (non-Hermitian matrix,
/// trace != 1, negative eigenvalue, ...).
class InvariantError : public Error {
 public:
  using Error::Error;
};

/// Constraint targets lie outside the reachable spectral range.
class InfeasibilityError : public Error {
 public:
  using Error::Error;
};

/// The requested quantity diverges on the feasible boundary.
class BoundaryError : public Error {
 public:
  using Error::Error;
};

/// Constraint observables are linearly dependent; the dual is not
/// identifiable.
class DependentConstraintsError : public Error {
 public:
  using Error::Error;
};

/// Evaluation would overflow double precision.
class OverflowError : public Error {
 public:
  using Error::Error;
};

/// A problem or sweep file could not be parsed.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace qmaxent
