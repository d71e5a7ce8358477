#pragma once

#include <stdexcept>
#include <string>

namespace svolterra {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain (e.g. a singular kernel at t <= 0).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Argument outside tabulated data.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// The requested operation is not defined for this object.
class UnsupportedOperation : public Error {
 public:
  using Error::Error;
};

/// Dimension or grid mismatch between operands.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Numerical breakdown (singular step, non-convergence).
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Yosida parameter n is not in the resolvent set, i.e. n <= lambda.
class ResolventSetError : public Error {
 public:
  using Error::Error;
};

/// Caller violated a documented precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Invalid run configuration; the message names the offending field.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace svolterra
