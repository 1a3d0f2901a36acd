#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace relmerge {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input. `line` is 1-based; 0 when the error is not tied to a line.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& message)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + message
                       : message),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// A value violates a domain invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Options that cannot be combined (e.g. a2 without an annotation source).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Two annotations give different labels to the same canonical pair.
class ConflictError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace relmerge
