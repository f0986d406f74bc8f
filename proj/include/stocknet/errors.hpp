#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace stocknet {

/// Malformed, missing or contract-violating input data.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input text that could not be parsed; carries the offending location.
class ParseError : public InputError {
 public:
  ParseError(std::size_t row, std::string column, const std::string& what)
      : InputError(locate(row, column) + what),
        row_(row),
        column_(std::move(column)) {}

  /// 1-based line number in the source, 0 when not applicable.
  std::size_t row() const noexcept { return row_; }
  const std::string& column() const noexcept { return column_; }

 private:
  static std::string locate(std::size_t row, const std::string& column) {
    std::string loc;
    if (row > 0) loc += "row " + std::to_string(row);
    if (!column.empty()) {
      if (!loc.empty()) loc += ", ";
      loc += "column '" + column + "'";
    }
    return loc.empty() ? loc : loc + ": ";
  }

  std::size_t row_;
  std::string column_;
};

/// Convergence failures, singular systems and similar numerical breakdowns.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A computed object failed one of its own structural invariants.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace stocknet
