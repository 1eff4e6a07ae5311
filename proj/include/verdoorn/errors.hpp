#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace verdoorn {

/// Broad failure class. The CLI maps each one to its own exit status.
enum class ErrorKind { parse, validation, estimation, invariant };

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

/// Malformed input text. `line` is 1-based; 0 when no line applies.
class ParseError : public Error {
public:
  ParseError(std::size_t line, const std::string& what)
      : Error(ErrorKind::parse, line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

class ValidationError : public Error {
public:
  explicit ValidationError(const std::string& what) : Error(ErrorKind::validation, what) {}
};

enum class EstimationFailure {
  sample_too_small,
  degenerate_regressor,
  invalid_input,
  insufficient_units,
  invalid_comparison,
  no_convergence,
};

class EstimationError : public Error {
public:
  EstimationError(EstimationFailure reason, const std::string& what)
      : Error(ErrorKind::estimation, what), reason_(reason) {}
  EstimationFailure reason() const noexcept { return reason_; }

private:
  EstimationFailure reason_;
};

class InvariantError : public Error {
public:
  explicit InvariantError(const std::string& what) : Error(ErrorKind::invariant, what) {}
};

}  // namespace verdoorn
