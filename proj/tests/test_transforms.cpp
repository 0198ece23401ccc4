#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/beta.hpp>

#include "coagfrag/errors.hpp"
#include "coagfrag/levy.hpp"
#include "coagfrag/rng.hpp"
#include "coagfrag/samplers.hpp"
#include "coagfrag/transforms.hpp"

using namespace coagfrag;
using boost::math::quadrature::gauss_kronrod;

namespace {

double rel_err(double a, double b) { return std::abs(a - b) / std::abs(b); }

const StepFunction g13({1, 3}, {0.5, 0.5});

// int_0^1 f(x, 1 - x) on a logit grid, for the simplex checks. Both
// coordinates are formed directly so neither rounds to 0 near the ends.
template <class F>
double unit_integral(F f) {
  auto h = [&](double s) {
    const double x = 1 / (1 + std::exp(-s));
    const double xc = 1 / (1 + std::exp(s));
    return f(x, xc) * x * xc;
  };
  double err = 0;
  return gauss_kronrod<double, 61>::integrate(h, -60, 60, 30, 1e-12, &err);
}

}  // namespace

TEST_CASE("StepFunction") {
  CHECK(g13.mean() == 2.0);
  const StepFunction p = StepFunction::parse("g=1,3;w=0.5,0.5");
  CHECK(p.values()[1] == 3.0);
  CHECK_THROWS_AS(StepFunction({1, 2}, {0.5, 0.6}), DomainError);
  CHECK_THROWS_AS(StepFunction({1, -2}, {0.5, 0.5}), DomainError);
  CHECK_THROWS_AS(StepFunction({1}, {0.5, 0.5}), DomainError);
  CHECK_THROWS_AS(StepFunction::parse("g=1,3"), DomainError);
}

TEST_CASE("closed-form transforms: hand values") {
  const StepFunction g12({1, 2}, {0.5, 0.5});
  CHECK(cs_dirichlet(1, 1, g12) == doctest::Approx(std::pow(2.0, -0.5) * std::pow(3.0, -0.5)).epsilon(1e-14));
  CHECK(cs_dirichlet(1, 1, g12) == doctest::Approx(0.40825).epsilon(1e-5));
  CHECK(cs_pd(0.5, 1, 1, g13) == doctest::Approx(std::pow(0.5 * std::sqrt(2.0) + 1.0, -2)).epsilon(1e-14));
  CHECK(cs_pd(0.5, 1, 1, g13) == doctest::Approx(0.34315).epsilon(1e-5));
  const double num = 0.5 / std::sqrt(2.0) + 0.5 / 2, den = 0.5 * std::sqrt(2.0) + 0.5 * 2;
  CHECK(cs_stable(0.5, 1, g13) == doctest::Approx(num / den).epsilon(1e-14));
  CHECK(num / den == doctest::Approx(0.35355).epsilon(1e-4));
}

TEST_CASE("closed forms: z = 0, monotone, constant g") {
  const StepFunction c({2.5, 2.5, 2.5}, {0.2, 0.3, 0.5});
  const StepFunction g({0.5, 4, 1}, {0.2, 0.3, 0.5});
  for (double z : {0.0, 0.3, 1.0, 5.0}) {
    CHECK(std::abs(cs_dirichlet(1.7, z, c) - std::pow(1 + z * 2.5, -1.7)) < 1e-12);
    CHECK(std::abs(cs_pd(0.4, 1.3, z, c) - std::pow(1 + z * 2.5, -1.3)) < 1e-12);
    CHECK(std::abs(cs_pd(0.4, -0.2, z, c) - std::pow(1 + z * 2.5, 0.2)) < 1e-12);
    CHECK(std::abs(cs_stable(0.4, z, c) - 1 / (1 + z * 2.5)) < 1e-12);
  }
  CHECK(cs_pd(0.4, 1.3, 0, g) == 1.0);
  CHECK(cs_dirichlet(1.3, 0, g) == 1.0);
  CHECK(cs_stable(0.4, 0, g) == 1.0);
  double prev[3] = {1, 1, 1};
  for (int i = 1; i <= 50; ++i) {
    const double z = 0.2 * i;
    const double v[3] = {cs_dirichlet(1.3, z, g), cs_pd(0.4, 1.3, z, g), cs_stable(0.4, z, g)};
    for (int k = 0; k < 3; ++k) {
      CHECK(v[k] < prev[k]);
      prev[k] = v[k];
    }
  }
}

TEST_CASE("cs_pk_tilted") {
  for (double theta : {0.5, 1.0, 2.0}) {
    CHECK(std::abs(cs_pk_tilted(gamma_model(4), theta, 0, g13) - 1) < 1e-8);
    CHECK(std::abs(cs_pk_tilted(linnik_model(6, 0.6, LinnikCumulantMethod::Exact), theta, 0, g13) - 1) < 1e-8);
  }
  for (double alpha : {0.3, 0.5, 0.8})
    for (double theta : {0.5, 1.0, 2.5})
      for (double z : {0.5, 1.0, 2.0})
        CHECK(rel_err(cs_pk_tilted(stable_model(alpha), theta, z, g13), cs_pd(alpha, theta, z, g13)) < 1e-6);
  // Negative tilt through integration by parts.
  CHECK(rel_err(cs_pk_tilted(stable_model(0.5), -0.3, 1, g13), cs_pd(0.5, -0.3, 1, g13)) < 1e-6);
  CHECK(rel_err(detail::cs_pk_tilted_by_parts(stable_model(0.5), 0.7, 2, g13), cs_pd(0.5, 0.7, 2, g13)) < 1e-6);
  // Gamma with constant g: P(g) = c a.s.
  const StepFunction c({2, 2}, {0.4, 0.6});
  CHECK(rel_err(cs_pk_tilted(gamma_model(4), 1, 1.5, c), 1 / (1 + 1.5 * 2)) < 1e-8);
  // PK(gamma(nu), any tilt) is PD(0, nu): compare with a Dirichlet-process simulation.
  McOptions o;
  o.samples = 200'000;
  o.threads = 1;
  for (double z : {0.5, 2.0}) {
    const McEstimate mc = cs_monte_carlo(PdLaw{0, 4}, 1, z, g13, RngStream(8, 0), o);
    CHECK(rel_err(cs_pk_tilted(gamma_model(4), 1, z, g13), mc.estimate) < 0.01);
  }
}

TEST_CASE("the substitution y = w^alpha links composed and tilted transforms") {
  for (const auto& base : {gamma_model(4), stable_model(0.5), linnik_model(6, 0.5, LinnikCumulantMethod::Exact)})
    for (double alpha : {0.4, 0.7})
      for (double theta : {0.5, 1.0})
        for (double z : {0.5, 2.0}) {
          INFO(base.spec() << " alpha=" << alpha << " theta=" << theta << " z=" << z);
          const double lhs = cs_pk_tilted(base, theta / alpha, 1.0, alpha_transformed(g13, alpha, z));
          const double rhs = cs_pk_tilted(alpha_compose(base, alpha), theta, z, g13);
          CHECK(rel_err(lhs, rhs) < 1e-6);
        }
  const StepFunction ga = alpha_transformed(g13, 0.5, 1);
  CHECK(ga.values()[0] == doctest::Approx(std::sqrt(2.0) - 1));
  CHECK_THROWS_AS(alpha_transformed(g13, 0.5, 0), DomainError);
}

TEST_CASE("cs_monte_carlo") {
  McOptions o;
  o.samples = 20'000;
  o.threads = 1;
  const RngStream rng(3, 0);
  const McEstimate zero = cs_monte_carlo(PdLaw{0.5, 1}, 1, 0.0, g13, rng, o);
  CHECK(zero.estimate == 1.0);
  CHECK(zero.std_error == 0.0);

  o.samples = 200'000;
  const std::vector<double> zs{0.5, 1, 2};
  const auto pd = cs_monte_carlo(PdLaw{0.5, 1}, 1, zs, g13, rng, o);
  for (std::size_t i = 0; i < zs.size(); ++i) {
    CHECK(pd[i].std_error > 0);
    CHECK(std::abs(pd[i].estimate - cs_pd(0.5, 1, zs[i], g13)) < 4 * pd[i].std_error);
  }
  const auto dp = cs_monte_carlo(PdLaw{0, 2}, 2, zs, g13, rng.derive(1), o);
  for (std::size_t i = 0; i < zs.size(); ++i)
    CHECK(std::abs(dp[i].estimate - cs_dirichlet(2, zs[i], g13)) < 4 * dp[i].std_error);
  const auto st = cs_monte_carlo(PdLaw{0.5, 0}, 1, zs, g13, rng.derive(2), o);
  for (std::size_t i = 0; i < zs.size(); ++i)
    CHECK(std::abs(st[i].estimate - cs_stable(0.5, zs[i], g13)) < 4 * st[i].std_error);
  // PD(0.5, 1) composed with PD(0.5, 2) is PD(0.25, 1).
  o.samples = 50'000;
  const auto comp = cs_monte_carlo(ComposedPdLaw{{0.5, 1}, {0.5, 2}}, 1, zs, g13, rng.derive(3), o);
  for (std::size_t i = 0; i < zs.size(); ++i)
    CHECK(std::abs(comp[i].estimate - cs_pd(0.25, 1, zs[i], g13)) < 4 * comp[i].std_error);
}

TEST_CASE("cs_monte_carlo does not depend on the thread count") {
  McOptions o;
  o.samples = 40'000;
  o.chunk_size = 5'000;
  const RngStream rng(4, 0);
  o.threads = 1;
  const McEstimate a = cs_monte_carlo(PdLaw{0.5, 1}, 1, 1.0, g13, rng, o);
  o.threads = 3;
  const McEstimate b = cs_monte_carlo(PdLaw{0.5, 1}, 1, 1.0, g13, rng, o);
  CHECK(a.estimate == b.estimate);
  CHECK(a.std_error == b.std_error);
}

TEST_CASE("dirichlet and carlton densities") {
  const std::vector<double> conc{1.2, 0.9};
  const double mass = unit_integral([&](double x, double xc) {
    const std::vector<double> y{x, xc};
    return dirichlet_density(conc, y);
  });
  CHECK(std::abs(mass - 1) < 1e-9);
  const std::vector<double> y{0.3, 0.7};
  const double beta_pdf = std::pow(0.3, 0.2) * std::pow(0.7, -0.1) / boost::math::beta(1.2, 0.9);
  CHECK(rel_err(dirichlet_density(conc, y), beta_pdf) < 1e-12);
  for (double eta : {-0.25, 0.5, 2.0})
    for (const std::vector<double>& p : {std::vector<double>{0.5, 0.5}, std::vector<double>{0.2, 0.8}}) {
      const double m = unit_integral([&](double x, double xc) {
        const std::vector<double> z{x, xc};
        return carlton_density(eta, p, z);
      });
      CHECK(std::abs(m - 1) < 1e-4);
    }
}

TEST_CASE("findim density") {
  const double theta = 2;
  // A very concentrated mixing law acts as a point mass at z*: the density
  // is then Dirichlet(theta z*).
  const std::vector<double> zstar{0.35, 0.65};
  const std::vector<double> sharp{1e4 * zstar[0], 1e4 * zstar[1]};
  auto narrow = [&](std::span<const double> z) { return dirichlet_density(sharp, z); };
  const std::vector<double> y{0.4, 0.6};
  const std::vector<double> tz{theta * zstar[0], theta * zstar[1]};
  CHECK(rel_err(findim_density_composed(theta, narrow, y), dirichlet_density(tz, y)) < 1e-3);

  const std::vector<double> conc{0.9, 2.1};
  auto dir = [&](std::span<const double> z) { return dirichlet_density(conc, z); };
  CHECK(std::abs(findim_total_mass(theta, dir) - 1) < 1e-4);
  // Independent check of one value: direct Kronrod integral of the mixture.
  const double direct = unit_integral([&](double x, double xc) {
    const std::vector<double> z{x, xc};
    const std::vector<double> c{theta * x, theta * xc};
    return dirichlet_density(conc, z) * dirichlet_density(c, y);
  });
  CHECK(rel_err(findim_density_composed(theta, dir, y), direct) < 1e-7);
  const double cdf = findim_cdf_composed(theta, dir, 0.4);
  CHECK(cdf > 0);
  CHECK(cdf < 1);
  CHECK(findim_cdf_composed(theta, dir, 0.2) < cdf);

  const std::vector<double> y4{0.1, 0.2, 0.3, 0.4};
  CHECK_THROWS_AS(findim_density_composed(theta, [](std::span<const double>) { return 1.0; }, y4), UnsupportedError);
}

TEST_CASE("findim m = 3 aggregates to m = 2") {
  // Dirichlet mixing aggregates, and so does the composed law: merging cells
  // 2 and 3 of the m = 3 case gives the m = 2 case. Check the density of the
  // first coordinate by integrating out the split.
  const double theta = 2, nu = 10;
  const std::vector<double> p3{0.2, 0.3, 0.5}, p2{0.2, 0.8};
  std::vector<double> c3, c2;
  for (double x : p3) c3.push_back(nu * x);
  for (double x : p2) c2.push_back(nu * x);
  auto f3 = [&](std::span<const double> z) { return dirichlet_density(c3, z); };
  auto f2 = [&](std::span<const double> z) { return dirichlet_density(c2, z); };
  FindimOptions fo;
  fo.rel_tol = 1e-6;
  const double y1 = 0.35;
  const std::vector<double> y2{y1, 1 - y1};
  const double marginal2 = findim_density_composed(theta, f2, y2, fo);
  // The split variable t has integrable singularities at both ends, with
  // tails in |ln t| that are heavy when the cell concentrations are near 1.
  // nu = 10 makes them decay like |ln t|^-4, and each half of (0, 1) is
  // integrated in s = ln(-ln t) out to |ln t| = 700.
  auto half = [&](bool low) {
    auto h = [&](double s) {
      const double u = std::exp(s);
      const double small = std::exp(-u);
      const double big = -std::expm1(-u);
      const double t1 = low ? small : big;
      const std::vector<double> y{y1, (1 - y1) * t1, (1 - y1) * (low ? big : small)};
      return findim_density_composed(theta, f3, y, fo) * (1 - y1) * small * u;
    };
    double err = 0;
    return gauss_kronrod<double, 15>::integrate(h, std::log(std::log(2.0)), std::log(700.0), 3, 1e-6, &err);
  };
  const double marginal3 = half(true) + half(false);
  CHECK(rel_err(marginal3, marginal2) < 2e-3);
}

TEST_CASE("findim with PD(1/2, eta) mixing") {
  const std::vector<double> p{0.5, 0.5};
  const std::vector<double> y{0.3, 0.7}, ys{0.7, 0.3};
  CHECK(rel_err(findim_density_pd_half(2, 0.5, p, y), findim_density_pd_half(2, 0.5, p, ys)) < 1e-9);
  auto f = [&](std::span<const double> z) { return carlton_density(0.5, p, z); };
  CHECK(std::abs(findim_total_mass(2, f) - 1) < 1e-3);
}
