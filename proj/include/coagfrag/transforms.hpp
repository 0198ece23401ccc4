#pragma once

// Generalized Cauchy-Stieltjes transforms E[(1 + z tau(g))^{-q}] of random
// probability measures on step functions, and finite-dimensional densities of
// PD(0, theta) composed with a random measure Q.

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "coagfrag/levy.hpp"
#include "coagfrag/rng.hpp"

namespace coagfrag {

/// g = values[i] on a cell of base-measure mass weights[i].
class StepFunction {
public:
  /// Requires equal lengths, values > 0, weights > 0 summing to 1 within 1e-12.
  StepFunction(std::vector<double> values, std::vector<double> weights);

  /// Parses "g=1,3;w=0.5,0.5".
  static StepFunction parse(std::string_view text);

  std::span<const double> values() const noexcept { return values_; }
  std::span<const double> weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return values_.size(); }
  /// sum_i w_i g_i
  double mean() const;

private:
  std::vector<double> values_;
  std::vector<double> weights_;
};

/// E[(1 + z P_{0,theta}(g))^{-theta}] = prod_i (1 + z g_i)^{-theta w_i}; theta > 0, z >= 0.
double cs_dirichlet(double theta, double z, const StepFunction& g);

/// E[(1 + z P_{alpha,theta}(g))^{-theta}] = (sum_i w_i (1 + z g_i)^alpha)^{-theta/alpha};
/// 0 < alpha < 1, theta != 0, theta > -alpha, z >= 0.
double cs_pd(double alpha, double theta, double z, const StepFunction& g);

/// E[(1 + z P_{alpha,0}(g))^{-1}] = sum w_i (1+z g_i)^{alpha-1} / sum w_i (1+z g_i)^alpha.
double cs_stable(double alpha, double z, const StepFunction& g);

/// E[(1 + z P(g))^{-theta}] for P ~ PK(rho, gamma_theta):
///   m_theta / Gamma(theta) int_0^inf y^{theta-1} exp(-sum_i w_i psi(y (1 + z g_i))) dy   (theta > 0),
/// and for -1 < theta < 0 the integrated-by-parts form
///   m_theta / Gamma(theta + 1) int_0^inf y^theta F(y) sum_i w_i c_i kappa_1(y c_i) dy,
/// c_i = 1 + z g_i, F the exponential above, which continues the first.
double cs_pk_tilted(const LevyModel& model, double theta, double z, const StepFunction& g);

namespace detail {
/// The integrated-by-parts form, valid for every theta > -1.
double cs_pk_tilted_by_parts(const LevyModel& model, double theta, double z, const StepFunction& g);
}  // namespace detail

/// g_alpha = (1 + z g)^alpha - 1 on the same cells; requires z > 0.
StepFunction alpha_transformed(const StepFunction& g, double alpha, double z);

/// Random measure PD(alpha, theta) with diffuse base measure.
struct PdLaw {
  double alpha = 0.0;
  double theta = 1.0;
};

/// tau_P o tau_Q with P ~ PD(alpha, theta) and Q ~ PD(beta, theta_q): the atoms
/// of P are located at iid draws from Q.
struct ComposedPdLaw {
  PdLaw p;
  PdLaw q;
};

using McLaw = std::variant<PdLaw, ComposedPdLaw>;

struct McOptions {
  long samples = 1'000'000;
  /// GEM truncation. The remainder is given the expected g value under the
  /// current cell masses, so the bias is second order in the remainder:
  /// at most |f''|/2 * tail_tol^2 * Var_H(g) (1 - alpha) / (1 + theta + k alpha)
  /// after k sticks.
  double tail_tol = 2e-2;
  long chunk_size = 1 << 14;
  /// Worker threads; 0 = hardware concurrency. Results do not depend on it.
  int threads = 0;
};

struct McEstimate {
  double z = 0.0;
  double estimate = 0.0;
  double std_error = 0.0;
};

/// Monte Carlo estimate of E[(1 + z tau(g))^{-q}] for every z in zs from the
/// same realizations. Chunk c draws from rng.derive(c) and chunks are reduced
/// in index order, so the result is reproducible for any thread count.
std::vector<McEstimate> cs_monte_carlo(const McLaw& law, double q, std::span<const double> zs,
                                       const StepFunction& g, const RngStream& rng, const McOptions& options = {});

McEstimate cs_monte_carlo(const McLaw& law, double q, double z, const StepFunction& g, const RngStream& rng,
                          const McOptions& options = {});

/// Density of a point of the m-simplex, evaluated at its m coordinates.
using SimplexDensity = std::function<double(std::span<const double>)>;

struct FindimOptions {
  /// z_i within this distance of 0 is excluded from the mixing integral.
  double boundary_band = 1e-10;
  double rel_tol = 1e-9;
};

double dirichlet_density(std::span<const double> concentrations, std::span<const double> y);

/// Density of (Q(C_1), ..., Q(C_m)) for Q ~ PD(1/2, eta), p_i = H(C_i):
///   prod p_i Gamma(eta + m/2) / (pi^{(m-1)/2} Gamma(eta + 1/2)) prod z_i^{-3/2}
///     / (sum p_i^2 / z_i)^{eta + m/2},  eta > -1/2.
double carlton_density(double eta, std::span<const double> p, std::span<const double> z);

/// Finite-dimensional density of PD(0, theta) o Q at y:
///   int f_Q(z) Gamma(theta) / prod Gamma(theta z_i) prod y_i^{theta z_i - 1} dz
/// over the (m-1)-simplex, m in {2, 3}, theta > 0, y interior.
double findim_density_composed(double theta, const SimplexDensity& f_q, std::span<const double> y,
                               const FindimOptions& options = {});

/// findim_density_composed with Q ~ PD(1/2, eta) through carlton_density.
double findim_density_pd_half(double theta, double eta, std::span<const double> p, std::span<const double> y,
                              const FindimOptions& options = {});

/// m = 2: P(Y_1 <= y1) = int f_Q(z, 1-z) I_{y1}(theta z, theta (1-z)) dz.
double findim_cdf_composed(double theta, const SimplexDensity& f_q, double y1, const FindimOptions& options = {});

/// m = 2: integral of the density over the simplex. The density has tails like
/// 1/(y |ln y|^{a+1}) at the edges, so the integral runs in y = exp(-e^s)
/// coordinates out to |ln y| = 1e9.
double findim_total_mass(double theta, const SimplexDensity& f_q, const FindimOptions& options = {});

}  // namespace coagfrag
