#pragma once

#include <stdexcept>
#include <string>

namespace franson {

/// Base of every error raised by the simulator. Subclasses map onto the
/// CLI exit codes (SchemaError -> 1, IoError -> 2, everything else -> 3).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class QuadratureNotConverged : public Error {
 public:
  using Error::Error;
};

class InvalidState : public Error {
 public:
  using Error::Error;
};

class NormalizationFailure : public Error {
 public:
  using Error::Error;
};

class ProtocolViolation : public Error {
 public:
  using Error::Error;
};

class FitDiverged : public Error {
 public:
  using Error::Error;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

class NoBeatDetected : public Error {
 public:
  using Error::Error;
};

class FeatureOutOfWindow : public Error {
 public:
  using Error::Error;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace franson
