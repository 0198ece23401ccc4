#pragma once

#include <stdexcept>
#include <string>

namespace coagfrag {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Parameters outside the documented range of an operation.
class DomainError : public Error {
public:
  using Error::Error;
};

/// A partition expected to refine another does not.
class RefinementError : public Error {
public:
  using Error::Error;
};

/// Adaptive quadrature ran out of subdivisions before reaching tolerance.
class ConvergenceError : public Error {
public:
  ConvergenceError(const std::string& what, double best_estimate, double error_estimate)
      : Error(what), best_estimate_(best_estimate), error_estimate_(error_estimate) {}

  double best_estimate() const noexcept { return best_estimate_; }
  double error_estimate() const noexcept { return error_estimate_; }

private:
  double best_estimate_;
  double error_estimate_;
};

/// A numeric evaluation produced a non-finite or out-of-range result.
class EvaluationError : public Error {
public:
  using Error::Error;
};

/// E[T^{-theta}] diverges for the requested tilt.
class TiltInfeasibleError : public Error {
public:
  using Error::Error;
};

/// Predictive weights of an EPPF violate the addition rule.
class ConsistencyError : public Error {
public:
  using Error::Error;
};

class UnsupportedError : public Error {
public:
  using Error::Error;
};

/// A caller-supplied sampler broke its contract (e.g. wrong ground-set size).
class ContractError : public Error {
public:
  using Error::Error;
};

}  // namespace coagfrag
