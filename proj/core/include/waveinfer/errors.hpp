#pragma once

#include <stdexcept>
#include <string>

namespace waveinfer {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid model or run configuration (bad parameters, unknown keys, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Argument outside an operation's domain (negative time, bad dt, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Mismatched lengths between mode-coefficient lists.
class ShapeError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Non-finite or overflowing arithmetic (path blow-up, expm overflow).
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Operation called without the data it needs (e.g. missing Ito record).
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Requested combination is not supported (e.g. exact scheme with correlated noise).
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

}  // namespace waveinfer
