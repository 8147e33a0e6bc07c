#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace crad {

/// Base of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the documented domain of a function.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Evaluation requested on the branch cut (closed negative real axis) or at the origin.
class BranchCutError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Corner whose opening makes the leading sector moment vanish (or is not a corner at all).
class DegenerateCornerError : public Error {
 public:
  using Error::Error;
};

/// Adaptive quadrature ran out of subdivisions. Carries the best estimate reached.
class AccuracyError : public Error {
 public:
  AccuracyError(const std::string& what, std::complex<double> best, double achieved)
      : Error(what), best_estimate(best), achieved_error(achieved) {}
  std::complex<double> best_estimate;
  double achieved_error;
};

/// Half-plane family whose intersection is unbounded.
class CoverageError : public Error {
 public:
  using Error::Error;
};

/// Corner-value fit failed its residual diagnostic.
class ExtractionError : public Error {
 public:
  using Error::Error;
};

/// Enclosure indicator never rose above its floating-point noise floor.
class UndetectableDirectionError : public Error {
 public:
  using Error::Error;
};

/// Exponential weight would overflow double precision.
class OverflowError : public Error {
 public:
  using Error::Error;
};

/// Boundary data does not cover the pieces the requested identity needs.
class MissingDataError : public Error {
 public:
  using Error::Error;
};

/// Invalid experiment configuration. `field` names the offending JSON path.
class ConfigError : public Error {
 public:
  ConfigError(std::string field_path, const std::string& message)
      : Error(field_path + ": " + message), field(std::move(field_path)) {}
  std::string field;
};

}  // namespace crad
