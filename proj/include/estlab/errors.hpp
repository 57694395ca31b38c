// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace estlab {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user-supplied configuration (CLI exit code 1).
class ConfigError : public Error {
 public:
  using Error::Error;
};

class InvalidDimension : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class InvalidPilot : public Error {
 public:
  using Error::Error;
};

class UnsupportedConfig : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Raised by the Cholesky factorization when a pivot is not strictly positive.
class SingularityError : public Error {
 public:
  explicit SingularityError(std::size_t pivot)
      : Error("matrix is numerically singular or indefinite at pivot " + std::to_string(pivot)),
        pivot_(pivot) {}

  std::size_t pivot() const noexcept { return pivot_; }

 private:
  std::size_t pivot_;
};

}  // namespace estlab
