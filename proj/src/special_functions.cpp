#include "coagfrag/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/special_functions/gamma.hpp>
#include <fmt/format.h>

#include "coagfrag/errors.hpp"

namespace coagfrag {

namespace {

constexpr double kPi = std::numbers::pi;

class CompensatedSum {
public:
  void add(double x) {
    const double t = sum_ + x;
    comp_ += std::abs(sum_) >= std::abs(x) ? (sum_ - t) + x : (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

bool is_half(double alpha) { return alpha == 0.5; }

/// 1 / Gamma(x) for any real x, zero at the poles.
double reciprocal_gamma(double x) {
  if (x <= 0.0 && x == std::floor(x)) return 0.0;
  return 1.0 / boost::math::tgamma(x);
}

/// log(1 + 2 c e^u + e^{2u}) without overflow.
double log_spectral_denominator(double u, double c) {
  if (u > 0.0) {
    const double e = std::exp(-u);
    return 2.0 * u + std::log1p(2.0 * c * e + e * e);
  }
  const double e = std::exp(u);
  return std::log1p(2.0 * c * e + e * e);
}

void check_ml_args(double alpha, double q) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw DomainError(fmt::format("mittag_leffler: alpha={} outside (0,1]", alpha));
  if (!(q >= 0.0)) throw DomainError(fmt::format("mittag_leffler: q={} must be >= 0", q));
}

/// log of the largest series term q^k / Gamma(1 + k alpha).
double log_max_series_term(double alpha, double q) {
  if (q == 0.0) return 0.0;
  const double lq = std::log(q);
  double best = 0.0;
  for (int k = 1; k < 400; ++k) {
    const double v = k * lq - log_gamma(1.0 + k * alpha);
    best = std::max(best, v);
    if (v < best - 5.0) break;
  }
  return best;
}

constexpr double kAsymptoticStart = 40.0;

/// Large-q expansion sum_{k>=1} (-1)^{k+1} q^{-k} / Gamma(1 - k alpha), optimally
/// truncated. Returns NaN when the smallest term is not negligible.
double mittag_leffler_asymptotic(double alpha, double q) {
  CompensatedSum sum;
  double last = std::numeric_limits<double>::infinity();
  const double lq = std::log(q);
  for (int k = 1; k < 200; ++k) {
    const double rg = reciprocal_gamma(1.0 - k * alpha);
    if (rg == 0.0) continue;
    const double term = (k % 2 == 1 ? 1.0 : -1.0) * rg * std::exp(-k * lq);
    if (std::abs(term) > last) break;
    sum.add(term);
    last = std::abs(term);
    if (last < 1e-17 * std::abs(sum.value())) return sum.value();
  }
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

double log_gamma(double x) {
  if (!(x > 0.0)) throw DomainError(fmt::format("log_gamma: argument {} must be positive", x));
  return boost::math::lgamma(x);
}

double rising_factorial(double x, int n, double step) {
  if (n < 0) throw DomainError("rising_factorial: n must be nonnegative");
  double p = 1.0;
  for (int i = 0; i < n; ++i) p *= x + i * step;
  return p;
}

double stable_tilt_constant(double alpha, double theta) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("stable_tilt_constant: alpha outside (0,1)");
  if (!(theta > -alpha)) throw TiltInfeasibleError("stable_tilt_constant: requires theta > -alpha");
  return std::exp(log_gamma(theta + 1.0) - log_gamma(theta / alpha + 1.0));
}

namespace detail {

double mittag_leffler_series(double alpha, double q) {
  CompensatedSum sum;
  sum.add(1.0);
  if (q == 0.0) return 1.0;
  const double lq = std::log(q);
  double peak = 0.0;
  for (int k = 1; k < 2000; ++k) {
    const double lt = k * lq - log_gamma(1.0 + k * alpha);
    peak = std::max(peak, lt);
    sum.add((k % 2 == 1 ? -1.0 : 1.0) * std::exp(lt));
    if (lt < peak && lt < std::log(1e-18 * std::max(std::abs(sum.value()), 1e-300))) return sum.value();
  }
  throw EvaluationError(fmt::format("mittag_leffler_series: no convergence at alpha={}, q={}", alpha, q));
}

double mittag_leffler_spectral(double alpha, double q) { return std::exp(log_mittag_leffler(alpha, q)); }

double log_mittag_leffler(double alpha, double q) {
  check_ml_args(alpha, q);
  if (q == 0.0) return 0.0;
  if (alpha == 1.0) return -q;
  if (q <= 2.0 && log_max_series_term(alpha, q) < std::log(1e3)) return std::log(mittag_leffler_series(alpha, q));
  if (q >= kAsymptoticStart) {
    const double v = mittag_leffler_asymptotic(alpha, q);
    if (std::isfinite(v) && v > 0.0) return std::log(v);
  }
  const double log_t = std::log(q) / alpha;  // t = q^{1/alpha}
  const double c = std::cos(alpha * kPi);
  auto log_f = [&](double x) {
    // r = e^x; Laplace kernel e^{-r t}, spectral weight r^{alpha-1} / D(r).
    return -std::exp(x + log_t) + (alpha - 1.0) * x - log_spectral_denominator(alpha * x, c);
  };
  QuadratureSettings s;
  s.rel_tol = 1e-12;
  const LogQuadratureResult r = log_integrate_positive(log_f, s);
  return std::log(std::sin(alpha * kPi) / kPi) + r.log_value;
}

}  // namespace detail

double mittag_leffler(double alpha, double q) {
  check_ml_args(alpha, q);
  return std::exp(detail::log_mittag_leffler(alpha, q));
}

namespace detail {

double stable_density_zolotarev(double alpha, double t) {
  const double a1 = 1.0 - alpha;
  const double log_c = -alpha / a1 * std::log(t);
  auto log_u = [&](double phi) {
    return alpha / a1 * std::log(std::sin(alpha * phi)) + std::log(std::sin(a1 * phi)) -
           std::log(std::sin(phi)) / a1 + log_c;
  };
  auto integrand = [&](double phi) {
    const double lu = log_u(phi);
    if (lu > 700.0) return 0.0;
    return std::exp(lu - std::exp(lu));
  };
  // u(phi) increases on (0, pi); split where u = 1, the integrand's peak.
  const double eps = 1e-12;
  double lo = eps;
  double hi = kPi - eps;
  std::vector<double> cuts{0.0};
  if (log_u(lo) < 0.0 && log_u(hi) > 0.0) {
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      (log_u(mid) < 0.0 ? lo : hi) = mid;
    }
    cuts.push_back(0.5 * (lo + hi));
  }
  cuts.push_back(kPi);
  QuadratureSettings s;
  s.rel_tol = 1e-11;
  s.abs_tol = 1e-300;
  s.max_subdivisions = 400;
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) total += integrate_interval(integrand, cuts[i], cuts[i + 1], s).value;
  return alpha / (a1 * kPi * t) * total;
}

double stable_density_series(double alpha, double t) {
  CompensatedSum sum;
  const double lt = std::log(t);
  int small_run = 0;
  for (int k = 1; k < 500; ++k) {
    const double mag = std::exp(log_gamma(k * alpha + 1.0) - log_gamma(k + 1.0) - (k * alpha + 1.0) * lt);
    const double term = (k % 2 == 1 ? 1.0 : -1.0) * mag * std::sin(k * kPi * alpha);
    sum.add(term);
    if (mag < 1e-18 * std::abs(sum.value())) {
      if (++small_run >= 3) return sum.value() / kPi;
    } else {
      small_run = 0;
    }
  }
  throw EvaluationError(fmt::format("stable_density_series: no convergence at alpha={}, t={}", alpha, t));
}

}  // namespace detail

double stable_density(double alpha, double t) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError(fmt::format("stable_density: alpha={} outside (0,1)", alpha));
  if (!(t > 0.0)) throw DomainError(fmt::format("stable_density: t={} must be positive", t));
  if (is_half(alpha)) return std::exp(-1.5 * std::log(t) - 0.25 / t) / (2.0 * std::sqrt(kPi));
  // t^{-alpha} <= 1/4 keeps the expansion dominated by its first terms.
  if (alpha * std::log(t) >= std::log(4.0)) return detail::stable_density_series(alpha, t);
  return detail::stable_density_zolotarev(alpha, t);
}

namespace detail {

double r_kernel_series(int n, double y, double alpha) {
  if (!(y > 1.0)) throw EvaluationError(fmt::format("r_kernel_series: diverges for y={} <= 1", y));
  CompensatedSum sum;
  const double ly = std::log(y);
  const double lg_n = log_gamma(n);
  double peak = -std::numeric_limits<double>::infinity();
  for (int l = 0; l < 5000; ++l) {
    const double lt = log_gamma(n + l * alpha) - log_gamma(1.0 + l * alpha) - l * ly;
    peak = std::max(peak, lt);
    sum.add((l % 2 == 0 ? 1.0 : -1.0) * std::exp(lt - lg_n));
    if (l > 2 && lt < peak && std::exp(lt - lg_n) < 1e-17 * std::abs(sum.value())) return std::exp(lg_n) * sum.value();
  }
  throw EvaluationError(fmt::format("r_kernel_series: no convergence at n={}, y={}", n, y));
}

double r_kernel_integral(int n, double y, double alpha) {
  const double log_y = std::log(y);
  auto log_f = [&](double x) {
    const double q = std::exp(alpha * x - log_y);
    const double lphi = std::isfinite(q) ? log_mittag_leffler(alpha, q) : -std::numeric_limits<double>::infinity();
    return (n - 1) * x - std::exp(x) + lphi;
  };
  QuadratureSettings s;
  s.rel_tol = 1e-10;
  return std::exp(log_integrate_positive(log_f, s).log_value);
}

double r_kernel_spectral(int n, double y, double alpha) {
  const double log_scale = -std::log(y) / alpha;  // log y^{-1/alpha}
  const double c = std::cos(alpha * kPi);
  auto log_f = [&](double x) {
    const double u = x + log_scale;
    const double log1p_ry = u > 30.0 ? u + std::log1p(std::exp(-u)) : std::log1p(std::exp(u));
    return (alpha - 1.0) * x - log_spectral_denominator(alpha * x, c) - n * log1p_ry;
  };
  QuadratureSettings s;
  s.rel_tol = 1e-12;
  const double log_int = log_integrate_positive(log_f, s).log_value;
  return std::exp(log_gamma(n) + std::log(std::sin(alpha * kPi) / kPi) + log_int);
}

}  // namespace detail

double r_kernel(int n, double y, double alpha) {
  if (n < 1) throw DomainError("r_kernel: n must be >= 1");
  if (!(y > 0.0)) throw DomainError("r_kernel: y must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("r_kernel: alpha outside (0,1)");
  if (y >= 4.0 * n) return detail::r_kernel_series(n, y, alpha);
  return detail::r_kernel_spectral(n, y, alpha);
}

double hermite_function(int n, double x) {
  if (n < 1) throw DomainError("hermite_function: n must be >= 1");
  if (!(x >= 0.0)) throw DomainError("hermite_function: x must be >= 0");
  const double root2x = std::sqrt(2.0) * x;
  auto log_f = [&](double u) {  // s = e^u
    return (n - 1) * u - std::exp(u) - root2x * std::exp(0.5 * u);
  };
  QuadratureSettings s;
  s.rel_tol = 1e-12;
  const double log_int = log_integrate_positive(log_f, s).log_value;
  return std::exp((n - 1) * std::log(2.0) - log_gamma(2.0 * n) + log_int);
}

double r_kernel_hermite(int n, double y) {
  if (n < 1) throw DomainError("r_kernel_hermite: n must be >= 1");
  if (!(y > 0.0)) throw DomainError("r_kernel_hermite: y must be positive");
  auto log_f = [&](double u) {  // x = e^u
    const double x = std::exp(u);
    return std::log(hermite_function(n, x / y)) - 0.5 * x * x;
  };
  QuadratureSettings s;
  s.rel_tol = 1e-11;
  const double log_int = log_integrate_positive(log_f, s).log_value;
  return std::exp(log_gamma(2.0 * n) + (1.5 - n) * std::log(2.0) - 0.5 * std::log(kPi) + log_int);
}

}  // namespace coagfrag
