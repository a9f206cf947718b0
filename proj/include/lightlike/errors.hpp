#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lightlike {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed expression source. `position` is a 0-based byte offset.
class ParseError : public Error {
public:
  ParseError(std::size_t position, const std::string& message)
      : Error("parse error at " + std::to_string(position) + ": " + message),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

private:
  std::size_t position_;
};

/// Evaluation outside the domain of a function (log of non-positive, etc.).
class DomainError : public Error {
public:
  using Error::Error;
};

/// A central-difference stencil left the domain of a callback-backed field.
class StencilError : public Error {
public:
  using Error::Error;
};

/// Tensor variance or shape does not fit the requested operation.
class SignatureError : public Error {
public:
  using Error::Error;
};

/// Computed nullity of g(p) differs from the declared nullity degree.
class NullityMismatch : public Error {
public:
  using Error::Error;
};

/// A metric that must be non-degenerate is singular at some point.
class DegeneracyError : public Error {
public:
  using Error::Error;
};

/// Internal consistency fault: a construction failed its own round-trip check.
class ConsistencyFault : public Error {
public:
  using Error::Error;
};

/// Bad manifest or command-line input.
class InputError : public Error {
public:
  using Error::Error;
};

}  // namespace lightlike
