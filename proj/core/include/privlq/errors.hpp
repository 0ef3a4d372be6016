#pragma once

#include <stdexcept>
#include <string>

namespace privlq {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A matrix required to be symmetric is not; the message names it.
class NonSymmetricError : public Error {
 public:
  explicit NonSymmetricError(const std::string& matrix_name)
      : Error("matrix " + matrix_name + " is not symmetric"), matrix_(matrix_name) {}
  const std::string& matrix_name() const { return matrix_; }

 private:
  std::string matrix_;
};

/// A matrix required to be positive definite is not; the message names it.
class NotPositiveDefiniteError : public Error {
 public:
  explicit NotPositiveDefiniteError(const std::string& matrix_name)
      : Error("matrix " + matrix_name + " is not positive definite"), matrix_(matrix_name) {}
  const std::string& matrix_name() const { return matrix_; }

 private:
  std::string matrix_;
};

class DimensionMismatchError : public Error {
 public:
  using Error::Error;
};

/// B'S(k+1)B + U came out numerically singular (cannot happen with U > 0).
class SingularInnerMatrixError : public Error {
 public:
  using Error::Error;
};

/// Innovation covariance of the estimator update is numerically singular.
class SingularInnovationError : public Error {
 public:
  using Error::Error;
};

/// The restorer coefficients 1/(rho-1) would amplify round-off unboundedly.
class RhoTooCloseToOneError : public Error {
 public:
  using Error::Error;
};

/// Error-coefficient assembly asked for a step beyond the recorded gains.
class InsufficientHistoryError : public Error {
 public:
  using Error::Error;
};

class NotPsdError : public Error {
 public:
  using Error::Error;
};

class ParameterOutOfRangeError : public Error {
 public:
  using Error::Error;
};

/// Experiment configuration failed to parse or validate.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace privlq
