#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nnrepair {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed argument: wrong vector length, non-finite value, bad shape.
class InvalidInputError : public Error {
 public:
  using Error::Error;
};

/// A WeightId that does not name a parameter of the network.
class AddressError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent configuration (thresholds, heuristic sizes, empty specs).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Text that could not be parsed. `line()` is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what, std::size_t line = 0)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Parsed data that violates a domain invariant (e.g. label out of range).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A Script that cannot be rendered (undeclared symbol, ill-typed term).
class EmissionError : public Error {
 public:
  using Error::Error;
};

/// A solver model value we refuse to approximate (algebraic root objects).
class UnsupportedValueError : public Error {
 public:
  using Error::Error;
};

/// Training diverged.
class TrainingError : public Error {
 public:
  TrainingError(const std::string& what, std::size_t epoch)
      : Error("epoch " + std::to_string(epoch) + ": " + what), epoch_(epoch) {}

  std::size_t epoch() const { return epoch_; }

 private:
  std::size_t epoch_;
};

}  // namespace nnrepair
