#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tropkm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Text input did not match the expected grammar.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error(format(what, line, column)), line_(line), column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  static std::string format(const std::string& what, std::size_t line, std::size_t column) {
    std::string out = what;
    if (line != 0) out += " (line " + std::to_string(line);
    if (column != 0) out += (line != 0 ? ", column " : " (column ") + std::to_string(column);
    if (line != 0 || column != 0) out += ")";
    return out;
  }

  std::size_t line_;
  std::size_t column_;
};

/// A valuation could not be decided from the stored window of a truncated series.
/// Callers recover by recomputing at a larger horizon.
class IndeterminateValuation : public Error {
 public:
  using Error::Error;
};

/// The precision escalation cap was reached without deciding a valuation.
class PrecisionExhausted : public Error {
 public:
  using Error::Error;
};

class SingularMatrix : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// An argument violated a documented precondition.
class DomainError : public Error {
 public:
  using Error::Error;
};

class NotInTightSubspace : public Error {
 public:
  using Error::Error;
};

/// A result failed its own certificate check. Always a defect, never bad input.
class VerificationFailed : public Error {
 public:
  using Error::Error;
};

class IterationBudgetExceeded : public Error {
 public:
  using Error::Error;
};

class IndexSumMismatch : public Error {
 public:
  using Error::Error;
};

class SizeLimit : public Error {
 public:
  using Error::Error;
};

class ExponentOverflow : public Error {
 public:
  using Error::Error;
};

}  // namespace tropkm
