#pragma once

#include <stdexcept>
#include <string>

namespace ratmin {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on caller-supplied data does not hold.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Floating-point trouble: simplex cycling, a singular denominator matrix,
/// a failed feasibility certificate.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// The simplex iteration cap was hit.
class LpCyclingError : public NumericalError {
 public:
  LpCyclingError(const std::string& what, std::size_t iterations)
      : NumericalError(what), iterations_(iterations) {}
  std::size_t iterations() const noexcept { return iterations_; }

 private:
  std::size_t iterations_;
};

/// The side constraints admit no approximant at any error level tried.
class UnsatisfiableError : public Error {
 public:
  using Error::Error;
};

}  // namespace ratmin
