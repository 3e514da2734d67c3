#pragma once

#include <stdexcept>
#include <string>

namespace entwit {

/// Base for every error the library raises. `exit_code()` is what the CLI
/// returns when the error escapes a command.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const noexcept { return 2; }
};

/// Bad arguments, malformed states, shape mismatches.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Input is not a valid density matrix (e.g. a negative eigenvalue).
class NotADensityMatrix : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Result would exceed the configured dimension cap.
class SizeLimitError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 3; }
};

/// Two independent numerical routes disagree beyond tolerance.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 4; }
};

}  // namespace entwit
