#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace srr {

// Base for every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad or unreadable input data: missing files, malformed rows, invalid prices.
class DataError : public Error {
 public:
  using Error::Error;
};

// Precondition violations on otherwise well-formed values (shapes, counts, parameters).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class InsufficientHistory : public Error {
 public:
  using Error::Error;
};

// Raised by the unregularized solvers when the system is numerically singular.
class SingularMatrixError : public Error {
 public:
  SingularMatrixError(const std::string& what, std::size_t pivot_index)
      : Error(what), pivot_index_(pivot_index) {}

  // 0-based column at which elimination (or the singular-value floor) failed.
  std::size_t pivot_index() const noexcept { return pivot_index_; }

 private:
  std::size_t pivot_index_;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace srr
