/// @file error.h
/// Exception hierarchy shared by all analysis modules.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace ghcft {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed model text. Carries the 1-based position of the offending token.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& msg)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// A reference (component, port, failure mode, state) that does not resolve.
class LookupError : public Error {
 public:
  using Error::Error;
};

/// An input failure mode rate required by a computation is missing.
class UnresolvedInputError : public Error {
 public:
  using Error::Error;
};

/// The component connection graph contains a cycle.
class CyclicDependencyError : public Error {
 public:
  CyclicDependencyError(std::vector<std::string> cycle, const std::string& msg)
      : Error(msg), cycle_(std::move(cycle)) {}

  /// Component ids along the cycle; the first id is repeated at the end.
  const std::vector<std::string>& cycle() const { return cycle_; }

 private:
  std::vector<std::string> cycle_;
};

/// The request is outside the mathematical domain of the method
/// (e.g. stationary analysis of a transient state, AND gate without mission time).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A repeated basic event violates the single-CMC-input restriction.
class SharedEventError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Numerical failure: singular system, step-size underflow.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A configured resource cap (cut sets, event count, solver steps) was hit.
class ResourceLimitError : public Error {
 public:
  using Error::Error;
};

}  // namespace ghcft
