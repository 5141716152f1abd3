#pragma once

#include <stdexcept>
#include <string>

namespace isostab {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Vectors or matrices with incompatible dimensions reached an operation.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Orthonormalization hit a numerically dependent vector.
class RankDeficiencyError : public Error {
 public:
  RankDeficiencyError(const std::string& what, int index)
      : Error(what), index(index) {}
  int index = -1;
};

/// A map spec or config violates one of its documented constraints.
class InvalidSpecError : public Error {
 public:
  using Error::Error;
};

/// A doubling step would push arguments outside the safe floating-point range.
class OverflowGuardError : public Error {
 public:
  using Error::Error;
};

/// The doubling limit of the map is not consistent with a linear isometry.
class InconsistencyError : public Error {
 public:
  using Error::Error;
};

/// A documented operation precondition does not hold for the given arguments.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A document (map file, report) could not be parsed.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace isostab
