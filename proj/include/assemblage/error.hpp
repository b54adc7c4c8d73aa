#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace assemblage {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. `line()` is 1-based; 0 when not tied to a line.
class ParseError : public Error {
public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

/// Well-formed input that violates a domain invariant.
class ValidationError : public Error {
public:
  ValidationError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

/// Caller broke an API precondition (dimension mismatch, non-normalized vector).
class ContractError : public Error {
public:
  using Error::Error;
};

/// Posterior mean requested for an interval with no data and a zero prior.
class EmptyIntervalError : public Error {
public:
  using Error::Error;
};

class InsufficientDataError : public Error {
public:
  using Error::Error;
};

class InfiniteDivergenceError : public Error {
public:
  using Error::Error;
};

}  // namespace assemblage
