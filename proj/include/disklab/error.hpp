#pragma once

#include <stdexcept>
#include <string>

namespace disklab {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bessel order above the configured maximum.
class UnsupportedOrder : public Error {
 public:
  using Error::Error;
};

/// Zero bracketing ran past its search window.
class ScanWindowError : public Error {
 public:
  using Error::Error;
};

/// Adaptive quadrature hit its refinement cap before reaching tolerance.
class QuadratureError : public Error {
 public:
  using Error::Error;
};

/// Collocation grid too coarse for the spectral basis.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

/// Iterative solver did not converge.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Moment pair not realizable by any element of V.
class InconsistentMoments : public Error {
 public:
  using Error::Error;
};

/// Rearrangement step lowered the energy.
class TransplantError : public Error {
 public:
  using Error::Error;
};

/// Time step too large for the current velocity field.
class CflViolation : public Error {
 public:
  using Error::Error;
};

/// Malformed or out-of-range experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace disklab
