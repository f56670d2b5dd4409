#pragma once

#include <stdexcept>
#include <string>

namespace qfde {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the mathematical domain of the operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A truncated series, product or limit did not settle within its term cap.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// A product denominator vanished.
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// q-gamma evaluated at a nonpositive integer.
class PoleError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// A computed object failed a post-condition it must satisfy by construction.
class InvariantError : public Error {
 public:
  using Error::Error;
};

class NotSupportedError : public Error {
 public:
  using Error::Error;
};

class LengthError : public Error {
 public:
  using Error::Error;
};

}  // namespace qfde
