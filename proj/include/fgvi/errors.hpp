#pragma once

#include <stdexcept>
#include <string>

namespace fgvi {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation (bad dimension,
/// correlation outside [0, 1), non-positive variance, malformed input file).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A matrix that should be positive definite failed factorization, or is too
/// close to singular for the requested computation.
class ConditioningError : public Error {
 public:
  ConditioningError(const std::string& what, long index)
      : Error(what), index_(index) {}

  /// Column at which factorization broke down, or -1 when not applicable.
  long index() const noexcept { return index_; }

 private:
  long index_;
};

/// A generator produced a matrix that does not pass validation.
class GenerationError : public Error {
 public:
  using Error::Error;
};

}  // namespace fgvi
