#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hgtomo {

/// A precondition on an argument or configuration value does not hold.
class ValidationError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// An index or order lies outside the supported range.
class BoundsError : public std::out_of_range {
public:
  using std::out_of_range::out_of_range;
};

/// A statistic is undefined for the given data (e.g. zero variance).
class UndefinedStatisticError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Reading or writing a file failed.
class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed CSV input. Row and column are 1-based; 0 means "whole row/file".
class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& what, std::size_t row, std::size_t column)
      : std::runtime_error(what + " (row " + std::to_string(row) + ", column " +
                           std::to_string(column) + ")"),
        row_(row), column_(column) {}

  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

private:
  std::size_t row_;
  std::size_t column_;
};

} // namespace hgtomo
