#pragma once

// Exchangeable partition probability functions: closed-form PD(alpha, theta),
// quadrature-based PK, tilted PK, PS and Linnik laws, and the fragmentation
// kernels that invert the coagulation results.

#include <optional>
#include <string>

#include "coagfrag/levy.hpp"
#include "coagfrag/partition.hpp"
#include "coagfrag/quadrature.hpp"

namespace coagfrag {

enum class EppfKind { PD, PK, PKTilted, PS, Linnik };

/// Tagged description of a partition law. Build with the factory functions,
/// which validate parameter ranges.
struct EppfSpec {
  EppfKind kind = EppfKind::PD;
  std::optional<LevyModel> model;
  double alpha = 0.0;
  double theta = 0.0;
  double nu = 0.0;

  static EppfSpec pd(double alpha, double theta);
  static EppfSpec pk(LevyModel model);
  static EppfSpec pk_tilted(LevyModel model, double theta);
  static EppfSpec ps(LevyModel model, double alpha, double theta);
  static EppfSpec linnik(double nu, double alpha, double theta);

  /// Canonical text form, e.g. "pd:alpha=0.5,theta=1".
  std::string describe() const;
  bool closed_form() const { return kind == EppfKind::PD; }
};

/// Quadrature tolerances used by every integral-based evaluator.
QuadratureSettings eppf_quadrature_settings();

/// (theta + alpha)_{k-1 up alpha} prod (1 - alpha)_{n_i - 1 up 1} / (theta + 1)_{n-1 up 1};
/// 0 <= alpha < 1, theta > -alpha.
double eppf_pd(double alpha, double theta, const SizeComposition& sizes);

/// (1/Gamma(n)) int lambda^{n-1} e^{-psi(lambda)} prod kappa_{n_i}(lambda) dlambda.
double eppf_pk(const LevyModel& model, const SizeComposition& sizes);

/// m_theta / Gamma(theta + n) int lambda^{theta+n-1} e^{-psi(lambda)} prod kappa_{n_i}(lambda) dlambda.
double eppf_pk_tilted(const LevyModel& model, double theta, const SizeComposition& sizes);

/// Law of PD(alpha, theta) coagulated by PK(rho, gamma_{theta/alpha}):
///   c_{alpha,theta} m_{theta/alpha}(rho) / Gamma(theta + n)
///     int lambda^{theta+n-1} e^{-psi(lambda^alpha)} prod kappa_{alpha,b_i}(lambda) dlambda.
double eppf_ps(const LevyModel& model, double alpha, double theta, const SizeComposition& sizes);

/// PD(alpha, theta) coagulated by PD(0, nu), through the R_n kernels:
///   c_{alpha,theta} Gamma(nu) / Gamma(nu - theta/alpha) nu^k alpha^{k-1} / Gamma(theta + n)
///     int y^{theta/alpha - 1} (1 + y)^{-nu} prod R_{n_j}(y | alpha) dy.
/// Requires nu > theta/alpha, 0 < alpha < 1, theta > -alpha.
double eppf_linnik(double nu, double alpha, double theta, const SizeComposition& sizes);

/// Conditional probability of `fine` given `coarse` under the fragmentation
/// kernel dual to PD(alpha, theta)-coagulation by PK(rho, gamma_{theta/alpha}):
///   p_{alpha,theta}(a) Gamma(theta/alpha + 1) Gamma(theta + n) / (Gamma(theta/alpha + K) Gamma(theta + 1))
///     * int lambda^{theta/alpha + K - 1} e^{-psi(lambda)} prod kappa_{j_i}(lambda) dlambda
///     / int lambda^{theta + n - 1} e^{-psi(lambda^alpha)} prod kappa_{alpha,b_i}(lambda) dlambda,
/// a = block sizes of fine (K blocks), b = block sizes of coarse, j_i = number
/// of fine blocks inside coarse block i. Throws RefinementError.
double frag_kernel_eppf(const LevyModel& model, double alpha, double theta, const SetPartition& fine,
                        const SetPartition& coarse);

/// The same kernel for rho = gamma(nu), written with the R_n kernels:
///   p_{alpha,theta}(a) Gamma(nu - theta/alpha) Gamma(theta + n) prod (j_i - 1)!
///     / (c_{alpha,theta} alpha^{k-1} Gamma(nu + K) int y^{theta/alpha-1} (1+y)^{-nu} prod R_{b_j}(y|alpha) dy).
double frag_kernel_eppf_dirichlet(double nu, double alpha, double theta, const SetPartition& fine,
                                  const SetPartition& coarse);

/// Dispatch on spec.kind.
double evaluate(const EppfSpec& spec, const SizeComposition& sizes);

/// Clamps quadrature noise in [-1e-9, 0) to 0 (with a warning on stderr) and
/// throws EvaluationError above 1 + 1e-9 or below -1e-9.
double check_probability(double value, const char* who);

}  // namespace coagfrag
