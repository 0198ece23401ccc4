#pragma once

// Adaptive Gauss-Kronrod integration on finite intervals, the half line, and
// log-space integration of positive, sharply peaked integrands.

#include <functional>

namespace coagfrag {

struct QuadratureSettings {
  double rel_tol = 1e-8;
  double abs_tol = 1e-12;
  int max_subdivisions = 200;

  /// Throws DomainError for non-positive tolerances or max_subdivisions < 1.
  void validate() const;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int subdivisions = 0;
};

/// Result of a log-space integration: log of the integral and a relative
/// error bound.
struct LogQuadratureResult {
  double log_value = 0.0;
  double rel_error = 0.0;
};

using Integrand = std::function<double(double)>;

/// Globally adaptive 21-point Gauss-Kronrod on [a, b]: the interval with the
/// largest error estimate is bisected until the total error meets
/// max(abs_tol, rel_tol * |value|). Throws ConvergenceError carrying the best
/// estimate when max_subdivisions is exhausted, EvaluationError on NaN/inf.
QuadratureResult integrate_interval(const Integrand& f, double a, double b,
                                    const QuadratureSettings& settings = {});

/// Integral over (0, inf) through x = u / (1 - u).
QuadratureResult integrate_semiinfinite(const Integrand& f, const QuadratureSettings& settings = {});

/// log of the integral over (0, inf) of a positive integrand supplied in log
/// form as a function of x = log(lambda): log_f(x) = log f(e^x).
///
/// Works in the variable x, finds the peak of log_f(x) + x by a bracketing
/// scan, truncates where the integrand has fallen below e^-46 of the peak and
/// integrates exp(h - h_max) with integrate_interval, split at the peak.
/// Suited to the EPPF and transform integrands, which span hundreds of orders
/// of magnitude.
LogQuadratureResult log_integrate_positive(const Integrand& log_f, const QuadratureSettings& settings = {});

}  // namespace coagfrag
