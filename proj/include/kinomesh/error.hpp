#pragma once

#include <stdexcept>
#include <string>

namespace kinomesh {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. Carries the 1-based line (or 0 when unknown).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Input is well-formed but uses an unsupported feature (e.g. quad faces).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Structurally invalid data: degenerate faces, bad limits, bad requests.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The planning request cannot have a solution (isolated start/goal, ...).
class InfeasibleInput : public Error {
 public:
  using Error::Error;
};

/// Path extraction found a selection that is not a single simple path.
class ExtractionError : public Error {
 public:
  using Error::Error;
};

}  // namespace kinomesh
