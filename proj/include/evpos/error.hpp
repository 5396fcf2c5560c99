#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace evpos {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shape mismatch or non-square input where a square operator is required.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// An iterative kernel did not converge.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

/// Overflow of a matrix exponential or of matrix powers.
class RangeError : public Error {
 public:
  using Error::Error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Spectral and sampled pathways of a verdict disagree.
class InconsistencyError : public Error {
 public:
  using Error::Error;
};

/// A resolvent was requested at (or numerically at) a spectral value.
class SpectralCollision : public Error {
 public:
  SpectralCollision(const std::string& what, std::complex<double> eigenvalue)
      : Error(what), eigenvalue_(eigenvalue) {}
  std::complex<double> eigenvalue() const noexcept { return eigenvalue_; }

 private:
  std::complex<double> eigenvalue_;
};

class NotSpectralValue : public Error {
 public:
  using Error::Error;
};

class ConditioningError : public Error {
 public:
  ConditioningError(const std::string& what, double condition)
      : Error(what), condition_(condition) {}
  double condition() const noexcept { return condition_; }

 private:
  double condition_;
};

/// Contour placement violates the enclosure preconditions.
class ContourError : public Error {
 public:
  using Error::Error;
};

}  // namespace evpos
