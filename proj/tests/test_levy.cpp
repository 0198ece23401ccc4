#include <doctest.h>

#include <cmath>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "coagfrag/errors.hpp"
#include "coagfrag/levy.hpp"

using namespace coagfrag;

namespace {

double rel_err(double a, double b) { return std::abs(a - b) / std::abs(b); }

double central_diff(const LevyModel& m, double lambda) {
  const double h = 1e-4 * lambda;
  return (m.psi(lambda - 2 * h) - 8 * m.psi(lambda - h) + 8 * m.psi(lambda + h) - m.psi(lambda + 2 * h)) / (12 * h);
}

std::vector<LevyModel> registered_models() {
  return {gamma_model(1),
          gamma_model(4),
          stable_model(0.3),
          stable_model(0.5),
          linnik_model(4, 0.5),
          linnik_model(4, 0.5, LinnikCumulantMethod::Exact),
          linnik_model(2, 0.7, LinnikCumulantMethod::Quadrature),
          alpha_compose(gamma_model(4), 0.5),
          alpha_compose(stable_model(0.5), 0.6),
          rescale(gamma_model(3), 2.5)};
}

}  // namespace

TEST_CASE("gamma model") {
  const LevyModel g1 = gamma_model(1);
  CHECK(g1.psi(0) == 0.0);
  CHECK(g1.cumulant(1, 1.0) == doctest::Approx(0.5));
  CHECK(gamma_model(2).cumulant(2, 1e-300) == doctest::Approx(2.0));
  for (double nu : {0.5, 2.0})
    for (int m = 1; m <= 4; ++m)
      for (double lambda : {0.5, 1.0, 2.0}) {
        boost::math::quadrature::exp_sinh<double> es;
        const double oracle =
            es.integrate([&](double s) { return nu * std::exp((m - 1) * std::log(s) - (1 + lambda) * s); });
        CHECK(rel_err(gamma_model(nu).cumulant(m, lambda), oracle) < 1e-8);
      }
  CHECK_THROWS_AS(gamma_model(0), DomainError);
}

TEST_CASE("stable model") {
  for (double alpha : {0.3, 0.5, 0.8}) CHECK(stable_model(alpha).psi(1.0) == doctest::Approx(1.0));
  CHECK(stable_model(0.5).cumulant(1, 1.0) == doctest::Approx(0.5));
  for (double alpha : {0.3, 0.5})
    for (int m = 1; m <= 4; ++m)
      for (double lambda : {0.5, 1.0, 2.0}) {
        boost::math::quadrature::exp_sinh<double> es;
        const double c = alpha / std::tgamma(1 - alpha);
        const double oracle =
            es.integrate([&](double s) { return c * std::exp((m - alpha - 1) * std::log(s) - lambda * s); });
        CHECK(rel_err(stable_model(alpha).cumulant(m, lambda), oracle) < 1e-8);
      }
  CHECK_THROWS_AS(stable_model(1.0), DomainError);
  CHECK_THROWS_AS(stable_model(0.0), DomainError);
}

TEST_CASE("kappa_1 is the derivative of psi for every model") {
  for (const auto& m : registered_models()) {
    CHECK(m.psi(0) == 0.0);
    for (double lambda : {0.5, 1.0, 2.0}) {
      INFO(m.spec() << " lambda=" << lambda);
      CHECK(rel_err(m.cumulant(1, lambda), central_diff(m, lambda)) < 1e-5);
      for (int k = 1; k <= 5; ++k) CHECK(m.cumulant(k, lambda) > 0);
    }
    double prev = 0;
    for (int i = 1; i < 50; ++i) {
      const double v = m.psi(0.2 * i);
      CHECK(v >= prev);
      prev = v;
    }
  }
}

TEST_CASE("linnik cumulants") {
  const double nu = 4, alpha = 0.5;
  for (double u : {0.5, 3.0, 10.0}) {
    const double analytic = alpha * std::pow(u, alpha - 1) / (1 + std::pow(u, alpha) / nu);
    CHECK(rel_err(linnik_cumulant_quadrature(nu, alpha, 1, u), analytic) < 1e-6);
    CHECK(rel_err(linnik_model(nu, alpha, LinnikCumulantMethod::Exact).cumulant(1, u), analytic) < 1e-12);
  }
  // Series converges for nu u^-alpha < 1 only.
  for (double u : {36.0, 100.0})
    for (int m = 1; m <= 4; ++m)
      CHECK(rel_err(linnik_cumulant_series(nu, alpha, m, u), linnik_cumulant_quadrature(nu, alpha, m, u)) < 1e-6);
  CHECK_THROWS_AS(linnik_cumulant_series(nu, alpha, 2, 3.0), EvaluationError);
  const double exact = linnik_model(nu, alpha, LinnikCumulantMethod::Exact).cumulant(2, 3.0);
  CHECK(rel_err(linnik_cumulant_quadrature(nu, alpha, 2, 3.0), exact) < 1e-6);
  CHECK(rel_err(linnik_model(nu, alpha).cumulant(2, 3.0), exact) < 1e-6);
}

TEST_CASE("alpha_compose") {
  const LevyModel c = alpha_compose(gamma_model(3), 0.5);
  for (double lambda : {0.1, 1.0, 7.0}) CHECK(c.psi(lambda) == doctest::Approx(3 * std::log1p(std::sqrt(lambda))));
  // d_nu(lambda^alpha) and the nu-scaled Linnik exponent differ by a rescaling of lambda.
  const LevyModel l = linnik_model(3, 0.5);
  for (double lambda : {0.1, 1.0, 7.0}) CHECK(l.psi(lambda * 9) == doctest::Approx(c.psi(lambda)).epsilon(1e-13));

  const double alpha = 0.6, beta = 0.5;
  const LevyModel cs = alpha_compose(stable_model(beta), alpha);
  const LevyModel s = stable_model(alpha * beta);
  for (int i = 0; i < 20; ++i) {
    const double lambda = std::exp(-4 + 0.4 * i);
    CHECK(std::abs(cs.psi(lambda) - s.psi(lambda)) <= 1e-12 * std::max(1.0, s.psi(lambda)));
    for (int m = 1; m <= 8; ++m) CHECK(rel_err(cs.cumulant(m, lambda), s.cumulant(m, lambda)) < 1e-10);
  }
  for (const auto& base : {gamma_model(4), stable_model(0.4), linnik_model(2, 0.5)})
    for (double a : {0.3, 0.7})
      for (int m = 1; m <= 5; ++m)
        for (double lambda : {0.5, 2.0}) {
          INFO(base.spec() << " alpha=" << a << " m=" << m << " lambda=" << lambda);
          // The difference oracle loses about two digits per order.
          CHECK(rel_err(alpha_compose(base, a).cumulant(m, lambda), composed_cumulant_numeric(base, a, m, lambda)) <
                (m <= 4 ? 1e-5 : 1e-4));
        }
  CHECK_THROWS_AS(composed_cumulant_numeric(gamma_model(1), 0.5, 9, 1.0), UnsupportedError);
}

TEST_CASE("rescale scales the total mass") {
  const LevyModel base = gamma_model(3);
  const LevyModel r = rescale(base, 2.0);
  for (double lambda : {0.3, 2.0}) {
    CHECK(r.psi(lambda) == doctest::Approx(base.psi(2 * lambda)));
    for (int m = 1; m <= 3; ++m) CHECK(rel_err(r.cumulant(m, lambda), std::pow(2.0, m) * base.cumulant(m, 2 * lambda)) < 1e-12);
  }
}

TEST_CASE("tilt normalizers") {
  CHECK(tilt(gamma_model(4), 0).m_theta == doctest::Approx(1.0));
  CHECK(tilt(stable_model(0.5), 0).m_theta == doctest::Approx(1.0));
  // m_theta = 1 / E[T^-theta]; E[T^-1] = 2 for the 1/2-stable law.
  const TiltedModel s = tilt(stable_model(0.5), 1.0);
  CHECK(s.m_theta == doctest::Approx(0.5));
  CHECK(std::exp(stable_model(0.5).log_negative_moment(1.0)) == doctest::Approx(2.0));
  CHECK(rel_err(tilt_normalizer_by_quadrature(stable_model(0.5), 1.0), 0.5) < 1e-7);
  const TiltedModel g = tilt(gamma_model(4), 2.0);
  CHECK(g.m_theta == doctest::Approx(6.0));
  CHECK(rel_err(tilt_normalizer_by_quadrature(gamma_model(4), 2.0), 6.0) < 1e-7);
  for (double theta : {0.4, 1.3}) CHECK(rel_err(tilt_normalizer_by_quadrature(stable_model(0.7), theta), tilt(stable_model(0.7), theta).m_theta) < 1e-6);
  CHECK_THROWS_AS(tilt(gamma_model(2), 2.0), TiltInfeasibleError);
  CHECK_THROWS_AS(tilt(gamma_model(2), 3.0), TiltInfeasibleError);
}
