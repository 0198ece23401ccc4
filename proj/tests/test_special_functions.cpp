#include <doctest.h>

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "coagfrag/errors.hpp"
#include "coagfrag/quadrature.hpp"
#include "coagfrag/special_functions.hpp"

using namespace coagfrag;
using boost::math::quadrature::gauss_kronrod;

namespace {

double rel_err(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Plain long double series, fine for q <= 2.
double ml_series_oracle(double alpha, double q) {
  long double s = 0;
  for (int k = 0; k < 2000; ++k) {
    const long double term = std::pow((long double)q, k) / std::tgamma(1.0L + k * (long double)alpha);
    s += k % 2 ? -term : term;
    if (k > 10 && term < 1e-22L) break;
  }
  return static_cast<double>(s);
}

// int_R f(e^x) e^x dx on [lo, hi] with Boost's adaptive Kronrod rule.
template <class F>
double log_axis_integral(F f, double lo, double hi) {
  auto g = [&](double x) {
    const double t = std::exp(x);
    return f(t) * t;
  };
  double err = 0;
  return gauss_kronrod<double, 61>::integrate(g, lo, hi, 25, 1e-12, &err);
}

// Truncated sum for R_n(y | alpha), valid when y is large against n.
double r_series_oracle(int n, double y, double alpha) {
  double s = 0;
  for (int l = 0; l < 400; ++l) {
    const double lt = std::lgamma(n + l * alpha) - std::lgamma(1 + l * alpha) - l * std::log(y);
    const double term = std::exp(lt);
    s += (l % 2 ? -term : term);
    if (term < 1e-18 * std::abs(s)) break;
  }
  return s;
}

}  // namespace

TEST_CASE("rising_factorial") {
  CHECK(rising_factorial(2, 0, 0.5) == 1.0);
  CHECK(rising_factorial(1, 3, 1) == 6.0);
  CHECK(rising_factorial(1.5, 2, 0.5) == 3.0);
  CHECK(rising_factorial(0.5, 4, 1) == doctest::Approx(0.5 * 1.5 * 2.5 * 3.5));
}

TEST_CASE("integrate_semiinfinite reproduces Gamma(a)") {
  CHECK(integrate_semiinfinite([](double x) { return std::exp(-x); }).value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(integrate_semiinfinite([](double x) { return x * std::exp(-x); }).value ==
        doctest::Approx(1.0).epsilon(1e-12));
  for (double a : {1.0, 1.5, 2.0, 3.5}) {
    const auto r = integrate_semiinfinite([a](double x) { return std::pow(x, a - 1) * std::exp(-x); });
    CHECK(rel_err(r.value, std::tgamma(a)) < 1e-8);
    CHECK(r.error <= 1e-8 * r.value + 1e-12);
  }
  CHECK(integrate_semiinfinite([](double x) { return std::sqrt(x) * std::exp(-x); }).value ==
        doctest::Approx(0.8862269254527580).epsilon(1e-9));
}

TEST_CASE("quadrature errors") {
  QuadratureSettings bad;
  bad.rel_tol = 0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  QuadratureSettings tight;
  tight.rel_tol = 1e-15;
  tight.abs_tol = 1e-300;
  tight.max_subdivisions = 2;
  CHECK_THROWS_AS(integrate_interval([](double x) { return std::sin(1 / x); }, 1e-6, 1, tight), ConvergenceError);
  try {
    integrate_interval([](double x) { return std::sin(1 / x); }, 1e-6, 1, tight);
  } catch (const ConvergenceError& e) {
    CHECK(std::isfinite(e.best_estimate()));
  }
  CHECK_THROWS_AS(integrate_interval([](double) { return std::nan(""); }, 0, 1), EvaluationError);
}

TEST_CASE("log_integrate_positive handles peaked integrands") {
  // int lambda^{a-1} e^{-lambda} = Gamma(a) for a large enough to overflow.
  for (double a : {0.5, 3.0, 180.0, 400.0}) {
    const auto r = log_integrate_positive([a](double x) { return (a - 1) * x - std::exp(x); });
    CHECK(std::abs(r.log_value - std::lgamma(a)) < 1e-9 * std::max(1.0, std::lgamma(a)));
  }
}

TEST_CASE("mittag_leffler values and identities") {
  CHECK(mittag_leffler(0.5, 0) == 1.0);
  CHECK(mittag_leffler(0.3, 0) == 1.0);
  CHECK(mittag_leffler(1.0, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  CHECK(mittag_leffler(0.5, 1.0) == doctest::Approx(0.4275835761558070).epsilon(1e-10));
  for (int i = 0; i <= 100; ++i) {
    const double q = 0.05 * i;
    const double oracle = std::exp(q * q) * std::erfc(q);
    CHECK(rel_err(mittag_leffler(0.5, q), oracle) < 1e-6);
  }
  for (double alpha : {0.3, 0.5, 0.7, 0.9})
    for (double q : {0.1, 0.7, 1.3, 2.0}) CHECK(rel_err(mittag_leffler(alpha, q), ml_series_oracle(alpha, q)) < 1e-10);
  CHECK_THROWS_AS(mittag_leffler(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(mittag_leffler(0.5, -1.0), DomainError);
}

TEST_CASE("mittag_leffler is decreasing in (0, 1]") {
  for (double alpha : {0.25, 0.5, 0.75}) {
    double prev = 1.0;
    for (int i = 1; i <= 400; ++i) {
      const double v = mittag_leffler(alpha, 0.1 * i);
      CHECK(v < prev);
      CHECK(v > 0.0);
      prev = v;
    }
  }
}

TEST_CASE("mittag_leffler against the stable-density Laplace transform") {
  // phi_alpha(q) = E[exp(-q T^{-alpha})] with T positive stable.
  for (double alpha : {0.3, 0.7})
    for (double q : {0.5, 3.0, 10.0}) {
      const double oracle = log_axis_integral(
          [&](double t) { return std::exp(-q * std::pow(t, -alpha)) * stable_density(alpha, t); }, -30, 400);
      CHECK(rel_err(mittag_leffler(alpha, q), oracle) < 1e-7);
    }
}

TEST_CASE("stable_density") {
  const double closed = std::exp(-0.25) / (2 * std::sqrt(std::numbers::pi));
  CHECK(stable_density(0.5, 1.0) == doctest::Approx(closed).epsilon(1e-14));
  CHECK(closed == doctest::Approx(0.219695).epsilon(1e-6));
  for (double alpha : {0.3, 0.5, 0.7}) {
    const double mass = log_axis_integral([&](double t) { return stable_density(alpha, t); }, -30, 400);
    CHECK(std::abs(mass - 1) < 1e-6);
    for (double lambda : {0.5, 1.0, 2.0}) {
      const double lt = log_axis_integral(
          [&](double t) { return std::exp(-lambda * t) * stable_density(alpha, t); }, -30, 40);
      CHECK(rel_err(lt, std::exp(-std::pow(lambda, alpha))) < 1e-5);
    }
  }
  // Zolotarev and series branches agree where both are usable.
  for (double alpha : {0.3, 0.7})
    for (double t : {5.0, 20.0}) {
      CHECK(rel_err(detail::stable_density_zolotarev(alpha, t), detail::stable_density_series(alpha, t)) < 1e-8);
    }
  CHECK_THROWS_AS(stable_density(1.0, 1.0), DomainError);
  CHECK_THROWS_AS(stable_density(0.5, 0.0), DomainError);
}

TEST_CASE("hermite_function") {
  CHECK(hermite_function(1, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(hermite_function(2, 0) == doctest::Approx(1.0 / 3).epsilon(1e-12));
  for (int n : {1, 2, 3, 4})
    for (double x : {0.3, 1.0, 4.0}) {
      boost::math::quadrature::exp_sinh<double> es;
      const double integral = es.integrate(
          [&](double s) { return std::exp((n - 1) * std::log(s) - s - x * std::sqrt(2 * s)); }, 1e-14);
      const double oracle = std::pow(2.0, n - 1) / std::tgamma(2 * n) * integral;
      CHECK(rel_err(hermite_function(n, x), oracle) < 1e-8);
    }
}

TEST_CASE("r_kernel") {
  for (double alpha : {0.3, 0.5, 0.8}) CHECK(std::abs(r_kernel(1, 1e12, alpha) - 1) < 1e-6);
  CHECK(rel_err(r_kernel(3, 1e12, 0.5), 2.0) < 1e-5);
  // Nested double integral with phi_alpha.
  CHECK(rel_err(r_kernel(2, 10, 0.5), detail::r_kernel_integral(2, 10, 0.5)) < 1e-6);
  for (double alpha : {0.3, 0.6})
    for (double y : {0.2, 1.0, 3.0}) CHECK(rel_err(r_kernel(3, y, alpha), detail::r_kernel_integral(3, y, alpha)) < 1e-6);
  // Hermite representation at alpha = 1/2.
  CHECK(rel_err(r_kernel(3, 5, 0.5), r_kernel_hermite(3, 5)) < 1e-6);
  for (int n = 1; n <= 4; ++n)
    for (double y : {2.0, 5.0, 10.0}) CHECK(rel_err(r_kernel(n, y, 0.5), r_kernel_hermite(n, y)) < 1e-6);
  // Series regime against an independent truncated sum.
  for (int n = 1; n <= 4; ++n)
    for (double alpha : {0.4, 0.7}) {
      const double y = 8.0 * n;
      CHECK(rel_err(r_kernel(n, y, alpha), r_series_oracle(n, y, alpha)) < 1e-10);
      CHECK(rel_err(detail::r_kernel_spectral(n, y, alpha), r_series_oracle(n, y, alpha)) < 1e-8);
    }
}

TEST_CASE("stable_tilt_constant") {
  CHECK(stable_tilt_constant(0.5, 1.0) == doctest::Approx(0.5));
  CHECK(stable_tilt_constant(0.5, 0.0) == doctest::Approx(1.0));
  // 1 / E[T^{-theta}] against the density.
  const double moment = log_axis_integral([](double t) { return std::pow(t, -1.5) * stable_density(0.6, t); }, -30, 400);
  CHECK(rel_err(stable_tilt_constant(0.6, 1.5), 1 / moment) < 1e-7);
}
