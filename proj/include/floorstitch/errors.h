#pragma once

#include <stdexcept>
#include <string>

namespace floorstitch {

// Base class for every error raised by the library. The CLI maps the
// concrete subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid user-supplied configuration (bad parameter ranges, n_rooms < 1, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Input file could not be parsed. Carries the offending line when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + message
                       : message),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Parsed data violates a documented invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Geometric input that admits no unique answer (coincident points, fewer than
// three distinct polygon vertices, ...).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  NumericalError(const std::string& message, int iteration)
      : Error(message + " (iteration " + std::to_string(iteration) + ")"),
        iteration_(iteration) {}
  int iteration() const { return iteration_; }

 private:
  int iteration_;
};

class MissingGroundTruthError : public Error {
 public:
  using Error::Error;
};

}  // namespace floorstitch
