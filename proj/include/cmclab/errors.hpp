#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cmclab {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands with mismatched dimension, order or budget.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// Division by a vanishing leading term, or a square root of a nonpositive one.
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// Input outside the domain where the problem is posed (|H| >= 1, outside a sphere, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A log power above the series cap carried a nonzero coefficient.
class LogCapOverflow : public Error {
 public:
  using Error::Error;
};

/// The coefficient recursion contradicted itself (non-affine probe, zero pivot, ...).
class InconsistencyError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Expression syntax error; `offset()` is the byte position in the source.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace cmclab
