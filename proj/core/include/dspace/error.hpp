#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dspace {

// Base for every error raised by the library. Callers that only care about
// "did the operation fail" catch this; the CLI maps it to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operands live in spaces of different dimensionality, or a point has the
// wrong number of coordinates.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Two decision spaces disagree on attribute names or domain ranges.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// Geometric construction that would describe an empty or malformed set.
class GeometryError : public Error {
 public:
  using Error::Error;
};

// Rule DSL / JSON document errors. Line and column are 1-based; zero means
// the position is unknown (e.g. a JSON structural error).
class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& what, std::size_t line, std::size_t column)
      : Error(position_prefix(line, column) + what), line_(line), column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  static std::string position_prefix(std::size_t line, std::size_t column) {
    if (line == 0) return {};
    return "line " + std::to_string(line) + ", column " + std::to_string(column) + ": ";
  }

  std::size_t line_;
  std::size_t column_;
};

// Rule set or tree that parses but cannot become a valid decision space.
class ConversionError : public Error {
 public:
  using Error::Error;
};

// Invalid merging scheme (bad leaf index, duplicate leaf, unsatisfiable
// builder request).
class SchemeError : public Error {
 public:
  using Error::Error;
};

// Operator precondition failure that is not a schema problem, e.g. a
// weighted combination where every weight is zero.
class OperatorError : public Error {
 public:
  using Error::Error;
};

}  // namespace dspace
