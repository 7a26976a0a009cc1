#pragma once

#include <stdexcept>
#include <string>

namespace catnh {

/// Root of every error raised by the library. Numeric failures derive from
/// NumericError so the CLI can map them onto a single exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

// Fock-space cutoff too small for the requested amplitude.
class TruncationError : public NumericError {
 public:
  using NumericError::NumericError;
};

// Amplitude too small for the odd cat (or a displaced-Fock pair) to exist.
class DegenerateAmplitude : public NumericError {
 public:
  using NumericError::NumericError;
};

class ConvergenceFailure : public NumericError {
 public:
  using NumericError::NumericError;
};

class ClassificationFailure : public NumericError {
 public:
  using NumericError::NumericError;
};

class StepSizeUnderflow : public NumericError {
 public:
  using NumericError::NumericError;
};

class PositivityLoss : public NumericError {
 public:
  using NumericError::NumericError;
};

class UndefinedDiagnosis : public NumericError {
 public:
  using NumericError::NumericError;
};

class UndefinedConcurrence : public NumericError {
 public:
  using NumericError::NumericError;
};

class NoSignChange : public NumericError {
 public:
  using NumericError::NumericError;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace catnh
