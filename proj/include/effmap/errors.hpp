#pragma once

#include <stdexcept>
#include <string>

namespace effmap {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sample arrays whose length does not match the grid they are paired with.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Invalid argument values (non-positive tolerances, empty ranges, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Geometry that does not fit the integration domain (truncated beams,
/// undersized far-field windows, elements outside the detector).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A weight-function discontinuity that does not sit on a cell boundary.
class AlignmentError : public Error {
 public:
  using Error::Error;
};

class UnsupportedModeError : public Error {
 public:
  using Error::Error;
};

/// An analytic limit (optical lever, diffraction grating) used outside its
/// validity threshold.
class LimitInvalidError : public Error {
 public:
  using Error::Error;
};

/// Weighting with zero sensitivity: the imprecision diverges and the
/// efficiency is undefined.
class DegenerateWeightingError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double previous, double last)
      : Error(what), previous_(previous), last_(last) {}

  double previous() const noexcept { return previous_; }
  double last() const noexcept { return last_; }

 private:
  double previous_;
  double last_;
};

}  // namespace effmap
