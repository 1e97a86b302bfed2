#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace sparseloc {

/// Invalid argument to a numeric routine (non-positive distance, bad zone, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A configuration object failed validation.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A file could not be parsed. Carries the 1-based line number when known.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Parsed data violated a semantic rule (e.g. timestamps out of order).
class ValidationError : public ParseError {
 public:
  using ParseError::ParseError;
};

/// An estimator could not produce an answer from its input.
class EstimationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-fatal notices collected by operations that recover from bad input.
struct Diagnostics {
  std::vector<std::string> warnings;
  void warn(std::string msg) { warnings.push_back(std::move(msg)); }
};

}  // namespace sparseloc
