#pragma once

// Subordinator descriptions: Laplace exponent psi, cumulants kappa_m and the
// negative moments of the total mass used for power tilting.

#include <memory>
#include <optional>
#include <string>

namespace coagfrag {

namespace detail {
class LevyImpl;
}

/// How the Linnik cumulants are computed.
enum class LinnikCumulantMethod {
  Auto,        ///< series where nu u^-alpha <= 1/2, quadrature elsewhere
  Series,      ///< alpha nu u^-m sum_l Gamma(m + l alpha)/Gamma(1 + l alpha) (-nu u^-alpha)^l
  Quadrature,  ///< alpha nu int s^{m-1} e^{-us} phi_alpha(nu s^alpha) ds
  Exact,       ///< finite Faa di Bruno sum over the gamma cumulants
};

/// An immutable subordinator model. Cheap to copy (shared implementation).
///
/// kappa_m(lambda) = int s^m e^{-lambda s} rho(ds) = (-1)^{m-1} psi^{(m)}(lambda).
/// Evaluations that feed log-space integrands take log(lambda) directly so that
/// lambda can range over e^{+-700}.
class LevyModel {
public:
  /// Human-readable and parseable description, e.g. "gamma:nu=4".
  std::string spec() const;

  double psi(double lambda) const;
  double psi_at_log(double log_lambda) const;

  /// kappa_m(lambda), m >= 1, lambda > 0.
  double cumulant(int m, double lambda) const;
  double log_cumulant(int m, double log_lambda) const;

  /// log E[T^{-theta}] for the total mass T with E[e^{-lambda T}] = e^{-psi(lambda)}.
  /// Throws TiltInfeasibleError when the moment is infinite.
  double log_negative_moment(double theta) const;

  /// Density of T when one is available.
  bool has_total_mass_density() const;
  double total_mass_density(double t) const;

  const detail::LevyImpl& impl() const { return *impl_; }

private:
  explicit LevyModel(std::shared_ptr<const detail::LevyImpl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const detail::LevyImpl> impl_;

  friend LevyModel make_model(std::shared_ptr<const detail::LevyImpl> impl);
};

/// psi(lambda) = nu ln(1 + lambda), kappa_m = nu Gamma(m) (1 + lambda)^-m.
LevyModel gamma_model(double nu);

/// psi(lambda) = lambda^alpha, kappa_m = alpha Gamma(m - alpha)/Gamma(1 - alpha) lambda^{alpha-m}.
LevyModel stable_model(double alpha);

/// psi(lambda) = nu ln(1 + lambda^alpha / nu).
LevyModel linnik_model(double nu, double alpha, LinnikCumulantMethod method = LinnikCumulantMethod::Auto);

/// psi_alpha(lambda) = psi(lambda^alpha). Cumulants come from the exact Faa di
/// Bruno expansion
///   kappa_{alpha,m}(lambda) = lambda^-m sum_j kappa_j(lambda^alpha) lambda^{j alpha} B_{m,j}(c),
/// c_i = |alpha (alpha-1) ... (alpha-i+1)|, in which every term is positive.
LevyModel alpha_compose(const LevyModel& base, double alpha);

/// psi(c lambda): the total mass is scaled by c. Partition laws are invariant.
LevyModel rescale(const LevyModel& base, double c);

/// kappa_{alpha,m}(lambda) for psi(lambda^alpha) by Richardson-extrapolated
/// central differences of order m. Independent of the Faa di Bruno path; used
/// as a cross-check. Roundoff grows like eps / h^m: relative accuracy is about
/// 1e-7 for m <= 4, 1e-5 at m = 5 and 1e-3 at m = 6, and the value is not
/// usable above that. Throws UnsupportedError for m > 8.
double composed_cumulant_numeric(const LevyModel& base, double alpha, int m, double lambda);

/// Linnik cumulants by the two direct routes. The series throws
/// EvaluationError when nu u^-alpha >= 1, where it diverges.
double linnik_cumulant_quadrature(double nu, double alpha, int m, double u);
double linnik_cumulant_series(double nu, double alpha, int m, double u);

/// Power-tempered model: total-mass density reweighted by m_theta t^-theta.
struct TiltedModel {
  LevyModel base;
  double theta = 0.0;
  double m_theta = 1.0;  ///< 1 / E[T^-theta]
};

/// Uses the closed-form negative moment of the model. Throws TiltInfeasibleError
/// when E[T^-theta] is infinite.
TiltedModel tilt(const LevyModel& base, double theta);

/// 1 / int t^-theta f_T(t) dt by quadrature against the total-mass density;
/// requires has_total_mass_density().
double tilt_normalizer_by_quadrature(const LevyModel& base, double theta);

namespace detail {

class LevyImpl {
public:
  virtual ~LevyImpl() = default;
  virtual std::string spec() const = 0;
  virtual double psi_at_log(double log_lambda) const = 0;
  virtual double log_cumulant(int m, double log_lambda) const = 0;
  virtual double log_negative_moment(double theta) const = 0;
  virtual std::optional<double> total_mass_density(double t) const = 0;
};

}  // namespace detail

}  // namespace coagfrag
