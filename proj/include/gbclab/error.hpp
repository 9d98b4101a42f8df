#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gbclab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed expression text. `position` is a byte offset into the full map source.
class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& what, std::size_t position)
      : Error(what + " at offset " + std::to_string(position)), position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

class UnknownIdentifier : public SyntaxError {
 public:
  using SyntaxError::SyntaxError;
};

class ArityMismatch : public Error {
 public:
  using Error::Error;
};

/// Evaluation left the smooth domain of an expression (log of a non-positive
/// number, division by zero, sqrt at 0, overflow to a non-finite value).
class DomainError : public Error {
 public:
  using Error::Error;
};

class SingularMatrix : public Error {
 public:
  using Error::Error;
};

/// Two independent evaluation routes of the same quantity disagree.
class PathMismatch : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class FitFailure : public Error {
 public:
  using Error::Error;
};

class DegenerateChart : public Error {
 public:
  using Error::Error;
};

class EigenFailure : public Error {
 public:
  using Error::Error;
};

/// A theorem hypothesis required by an operation does not hold for the input.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Invalid run configuration; `field` is the dotted path of the offending entry.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& field, const std::string& what)
      : Error(field + ": " + what), field_(field) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace gbclab
