#pragma once

#include <stdexcept>
#include <string>

namespace dispread {

/// Process exit codes used by the command-line front end.
enum class ExitCode : int {
  Ok = 0,
  CheckFailure = 1,
  ConfigError = 2,
  NumericalGuard = 3,
  IoError = 4,
};

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  [[nodiscard]] virtual ExitCode exit_code() const noexcept { return ExitCode::ConfigError; }
};

/// A precondition on user-supplied values was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A configuration file or sweep request could not be accepted.
class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// A numerical guard tripped during a computation.
class NumericalError : public Error {
 public:
  using Error::Error;
  [[nodiscard]] ExitCode exit_code() const noexcept override { return ExitCode::NumericalGuard; }
};

/// Population leaked into the top Fock levels of the truncated space.
class CutoffError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// The adaptive integrator could not meet its tolerance.
class IntegrationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Eigenvectors could not be matched unambiguously to bare basis states.
class LabelingError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Reading or writing a file failed.
class IoError : public Error {
 public:
  using Error::Error;
  [[nodiscard]] ExitCode exit_code() const noexcept override { return ExitCode::IoError; }
};

}  // namespace dispread
