#pragma once

#include <stdexcept>
#include <string>

namespace beamsel {

/// Base class for all library errors. Each category maps to a CLI exit code.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const noexcept = 0;
};

class ConfigError : public Error {
public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
};

/// An index selection that does not fit the candidate set it is applied to.
class SelectionError : public ConfigError {
public:
  using ConfigError::ConfigError;
};

/// Exhaustive search would exceed the configured combination cap.
class BudgetError : public Error {
public:
  using Error::Error;
  int exit_code() const noexcept override { return 3; }
};

/// I/O failure or malformed input file.
class ParseError : public Error {
public:
  using Error::Error;
  int exit_code() const noexcept override { return 4; }
};

class NumericalError : public Error {
public:
  using Error::Error;
  int exit_code() const noexcept override { return 5; }
};

}  // namespace beamsel
