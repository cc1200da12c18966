#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dmm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A documented precondition of an operation was violated by the caller.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Index arguments outside the available range (e.g. Hankel bounds).
class IndexError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

/// Density of a mixture with zero variance was requested.
class DegenerateDensityError : public Error {
 public:
  using Error::Error;
};

/// Fewer samples than the operation needs (e.g. n < number of batches).
class InsufficientSamplesError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

/// Malformed JSON input. Carries the 1-based line/column of the failure.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error(what), line_(line), column_(column) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// A numerical procedure could not produce a trustworthy answer. The message
/// describes what failed and, where useful, how to work around it.
class DiagnosticError : public Error {
 public:
  using Error::Error;
};

/// An iterative solver hit its iteration cap. The best iterate seen is kept.
class ConvergenceError : public DiagnosticError {
 public:
  ConvergenceError(const std::string& what, std::vector<double> best_iterate)
      : DiagnosticError(what), best_iterate_(std::move(best_iterate)) {}
  const std::vector<double>& best_iterate() const noexcept { return best_iterate_; }

 private:
  std::vector<double> best_iterate_;
};

}  // namespace dmm
