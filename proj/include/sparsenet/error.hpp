#pragma once

#include <stdexcept>
#include <string>

namespace sparsenet {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shapes or counts that violate an operation's preconditions.
class DimensionError : public Error {
 public:
  using Error::Error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

class SingularMatrixError : public Error {
 public:
  using Error::Error;
};

// A row with zero variance where a correlation is required.
class DegenerateError : public Error {
 public:
  DegenerateError(const std::string& what, long index)
      : Error(what), index_(index) {}
  long index() const noexcept { return index_; }

 private:
  long index_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace sparsenet
