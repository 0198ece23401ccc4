#include "coagfrag/eppf.hpp"

#include <cmath>
#include <map>
#include <vector>

#include <fmt/format.h>

#include "coagfrag/errors.hpp"
#include "coagfrag/special_functions.hpp"

namespace coagfrag {

namespace {

void check_pd_range(double alpha, double theta, const char* who) {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw DomainError(fmt::format("{}: alpha={} outside [0,1)", who, alpha));
  if (!(theta > -alpha)) throw DomainError(fmt::format("{}: theta={} must exceed -alpha={}", who, theta, -alpha));
}

void check_open_alpha(double alpha, double theta, const char* who) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError(fmt::format("{}: alpha={} outside (0,1)", who, alpha));
  if (!(theta > -alpha)) throw DomainError(fmt::format("{}: theta={} must exceed -alpha={}", who, theta, -alpha));
}

/// order -> multiplicity
std::map<int, int> multiplicities(std::span<const int> orders) {
  std::map<int, int> out;
  for (int o : orders) ++out[o];
  return out;
}

/// log int_0^inf lambda^power e^{-psi(lambda)} prod_i kappa_{orders_i}(lambda) dlambda.
double log_cumulant_integral(const LevyModel& model, double power, std::span<const int> orders) {
  const std::map<int, int> mult = multiplicities(orders);
  auto log_f = [&](double x) {
    double v = power * x - model.psi_at_log(x);
    for (const auto& [m, count] : mult) v += count * model.log_cumulant(m, x);
    return v;
  };
  return log_integrate_positive(log_f, eppf_quadrature_settings()).log_value;
}

/// log int_0^inf y^{theta/alpha - 1} (1 + y)^{-nu} prod_j R_{sizes_j}(y | alpha) dy.
double log_r_integral(double nu, double alpha, double theta, std::span<const int> sizes) {
  const std::map<int, int> mult = multiplicities(sizes);
  auto log_f = [&](double x) {
    const double log1p_y = x > 30.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
    double v = (theta / alpha - 1.0) * x - nu * log1p_y;
    const double y = std::exp(x);
    for (const auto& [n, count] : mult) v += count * std::log(r_kernel(n, y, alpha));
    return v;
  };
  return log_integrate_positive(log_f, eppf_quadrature_settings()).log_value;
}

double log_eppf_pd(double alpha, double theta, const SizeComposition& sizes) {
  double v = 0.0;
  for (int i = 1; i < sizes.k(); ++i) v += std::log(theta + i * alpha);
  for (int ni : sizes.sizes())
    for (int l = 1; l < ni; ++l) v += std::log(l - alpha);
  for (int l = 1; l < sizes.n(); ++l) v -= std::log(theta + l);
  return v;
}

double log_stable_tilt_constant(double alpha, double theta) {
  return log_gamma(theta + 1.0) - log_gamma(theta / alpha + 1.0);
}

std::vector<int> as_vector(std::span<const int> s) { return {s.begin(), s.end()}; }

}  // namespace

QuadratureSettings eppf_quadrature_settings() {
  QuadratureSettings s;
  s.rel_tol = 1e-10;
  s.abs_tol = 1e-14;
  s.max_subdivisions = 400;
  return s;
}

EppfSpec EppfSpec::pd(double alpha, double theta) {
  check_pd_range(alpha, theta, "EppfSpec::pd");
  EppfSpec s;
  s.kind = EppfKind::PD;
  s.alpha = alpha;
  s.theta = theta;
  return s;
}

EppfSpec EppfSpec::pk(LevyModel model) {
  EppfSpec s;
  s.kind = EppfKind::PK;
  s.model = std::move(model);
  return s;
}

EppfSpec EppfSpec::pk_tilted(LevyModel model, double theta) {
  if (!(theta > -1.0)) throw DomainError(fmt::format("EppfSpec::pk_tilted: theta={} must exceed -1", theta));
  model.log_negative_moment(theta);  // throws TiltInfeasibleError
  EppfSpec s;
  s.kind = EppfKind::PKTilted;
  s.model = std::move(model);
  s.theta = theta;
  return s;
}

EppfSpec EppfSpec::ps(LevyModel model, double alpha, double theta) {
  check_open_alpha(alpha, theta, "EppfSpec::ps");
  model.log_negative_moment(theta / alpha);
  EppfSpec s;
  s.kind = EppfKind::PS;
  s.model = std::move(model);
  s.alpha = alpha;
  s.theta = theta;
  return s;
}

EppfSpec EppfSpec::linnik(double nu, double alpha, double theta) {
  check_open_alpha(alpha, theta, "EppfSpec::linnik");
  if (!(nu > theta / alpha))
    throw TiltInfeasibleError(fmt::format("EppfSpec::linnik: requires nu > theta/alpha (nu={}, theta/alpha={})", nu,
                                          theta / alpha));
  EppfSpec s;
  s.kind = EppfKind::Linnik;
  s.nu = nu;
  s.alpha = alpha;
  s.theta = theta;
  return s;
}

std::string EppfSpec::describe() const {
  switch (kind) {
    case EppfKind::PD:
      return fmt::format("pd:alpha={},theta={}", alpha, theta);
    case EppfKind::PK:
      return fmt::format("pk:levy={}", model->spec());
    case EppfKind::PKTilted:
      return fmt::format("pk_tilted:levy={},theta={}", model->spec(), theta);
    case EppfKind::PS:
      return fmt::format("ps:levy={},alpha={},theta={}", model->spec(), alpha, theta);
    case EppfKind::Linnik:
      return fmt::format("linnik:nu={},alpha={},theta={}", nu, alpha, theta);
  }
  return "?";
}

double check_probability(double value, const char* who) {
  if (std::isnan(value)) throw EvaluationError(fmt::format("{}: NaN probability", who));
  if (value > 1.0 + 1e-9) throw EvaluationError(fmt::format("{}: probability {:.17g} exceeds 1", who, value));
  if (value < -1e-9) throw EvaluationError(fmt::format("{}: negative probability {:.17g}", who, value));
  if (value < 0.0) {
    fmt::print(stderr, "warning: {}: clamped quadrature noise {:.3g} to 0\n", who, value);
    return 0.0;
  }
  return value;
}

double eppf_pd(double alpha, double theta, const SizeComposition& sizes) {
  check_pd_range(alpha, theta, "eppf_pd");
  return check_probability(std::exp(log_eppf_pd(alpha, theta, sizes)), "eppf_pd");
}

double eppf_pk(const LevyModel& model, const SizeComposition& sizes) {
  const double n = sizes.n();
  const double v = -log_gamma(n) + log_cumulant_integral(model, n - 1.0, sizes.sizes());
  return check_probability(std::exp(v), "eppf_pk");
}

double eppf_pk_tilted(const LevyModel& model, double theta, const SizeComposition& sizes) {
  if (!(theta > -1.0)) throw DomainError(fmt::format("eppf_pk_tilted: theta={} must exceed -1", theta));
  const double n = sizes.n();
  const double v = -model.log_negative_moment(theta) - log_gamma(theta + n) +
                   log_cumulant_integral(model, theta + n - 1.0, sizes.sizes());
  return check_probability(std::exp(v), "eppf_pk_tilted");
}

double eppf_ps(const LevyModel& model, double alpha, double theta, const SizeComposition& sizes) {
  check_open_alpha(alpha, theta, "eppf_ps");
  const double n = sizes.n();
  const LevyModel composed = alpha_compose(model, alpha);
  const double v = log_stable_tilt_constant(alpha, theta) - model.log_negative_moment(theta / alpha) -
                   log_gamma(theta + n) + log_cumulant_integral(composed, theta + n - 1.0, sizes.sizes());
  return check_probability(std::exp(v), "eppf_ps");
}

double eppf_linnik(double nu, double alpha, double theta, const SizeComposition& sizes) {
  EppfSpec::linnik(nu, alpha, theta);  // range checks
  const int k = sizes.k();
  const double v = log_stable_tilt_constant(alpha, theta) + log_gamma(nu) - log_gamma(nu - theta / alpha) +
                   k * std::log(nu) + (k - 1) * std::log(alpha) - log_gamma(theta + sizes.n()) +
                   log_r_integral(nu, alpha, theta, sizes.sizes());
  return check_probability(std::exp(v), "eppf_linnik");
}

double frag_kernel_eppf(const LevyModel& model, double alpha, double theta, const SetPartition& fine,
                        const SetPartition& coarse) {
  check_open_alpha(alpha, theta, "frag_kernel_eppf");
  const std::vector<int> j = refinement_counts(fine, coarse);
  const double n = fine.n();
  const double K = fine.num_blocks();
  const double r = theta / alpha;
  const SizeComposition b = coarse.composition();
  const double v = log_eppf_pd(alpha, theta, fine.composition()) + log_gamma(r + 1.0) + log_gamma(theta + n) -
                   log_gamma(r + K) - log_gamma(theta + 1.0) + log_cumulant_integral(model, r + K - 1.0, j) -
                   log_cumulant_integral(alpha_compose(model, alpha), theta + n - 1.0, b.sizes());
  return check_probability(std::exp(v), "frag_kernel_eppf");
}

double frag_kernel_eppf_dirichlet(double nu, double alpha, double theta, const SetPartition& fine,
                                  const SetPartition& coarse) {
  EppfSpec::linnik(nu, alpha, theta);
  const std::vector<int> j = refinement_counts(fine, coarse);
  const double n = fine.n();
  const double K = fine.num_blocks();
  const int k = coarse.num_blocks();
  double log_fact = 0.0;
  for (int ji : j) log_fact += log_gamma(ji);
  const std::vector<int> b = as_vector(coarse.composition().sizes());
  const double v = log_eppf_pd(alpha, theta, fine.composition()) + log_gamma(nu - theta / alpha) +
                   log_gamma(theta + n) + log_fact - log_stable_tilt_constant(alpha, theta) -
                   (k - 1) * std::log(alpha) - log_gamma(nu + K) - log_r_integral(nu, alpha, theta, b);
  return check_probability(std::exp(v), "frag_kernel_eppf_dirichlet");
}

double evaluate(const EppfSpec& spec, const SizeComposition& sizes) {
  switch (spec.kind) {
    case EppfKind::PD:
      return eppf_pd(spec.alpha, spec.theta, sizes);
    case EppfKind::PK:
      return eppf_pk(*spec.model, sizes);
    case EppfKind::PKTilted:
      return eppf_pk_tilted(*spec.model, spec.theta, sizes);
    case EppfKind::PS:
      return eppf_ps(*spec.model, spec.alpha, spec.theta, sizes);
    case EppfKind::Linnik:
      return eppf_linnik(spec.nu, spec.alpha, spec.theta, sizes);
  }
  throw DomainError("evaluate: unknown EPPF kind");
}

}  // namespace coagfrag
