#pragma once

#include <stdexcept>
#include <string>

namespace smp {

/// Root of every error the library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration, flags, or hyperparameters.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed or unusable input data (files, tables, degenerate folds).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Arguments outside a formula's mathematical domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Fit/predict contract violations and training failures.
class ModelError : public Error {
 public:
  using Error::Error;
};

}  // namespace smp
