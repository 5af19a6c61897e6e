#pragma once

#include <stdexcept>
#include <string>

namespace gasrank {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid argument shapes or values supplied by the caller.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

// Malformed input data (files, rankings, covariates).
class DataError : public Error {
 public:
  using Error::Error;
};

// Anything that went wrong numerically: divergence, failed optimization,
// singular Hessians that cannot be recovered.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// The filter produced a non-finite or exploding worth. Raised separately so
// that the optimizer can treat the parameter region as infeasible.
class DivergenceError : public NumericalError {
 public:
  DivergenceError(const std::string& what, std::size_t period, std::size_t item)
      : NumericalError(what), period_(period), item_(item) {}

  std::size_t period() const noexcept { return period_; }
  std::size_t item() const noexcept { return item_; }

 private:
  std::size_t period_;
  std::size_t item_;
};

// Enumeration requested over a universe too large to enumerate.
class EnumerationLimit : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

}  // namespace gasrank
