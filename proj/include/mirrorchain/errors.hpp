#pragma once

#include <stdexcept>
#include <string>

namespace mirrorchain {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand sizes disagree (site counts, matrix dimensions).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Requested object would exceed the configured dense-size cap.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// Input fails a numerical invariant (unitarity, Hermiticity, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of the operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Caller violated a documented precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Greedy angle step has no information (W = Delta = 0).
class StallError : public Error {
 public:
  using Error::Error;
};

/// Peeling could not reduce the residual into the child subgroup.
class DecompositionError : public Error {
 public:
  using Error::Error;
};

/// Metric is undefined for the given arguments (zero-norm input).
class MetricError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file or document.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace mirrorchain
