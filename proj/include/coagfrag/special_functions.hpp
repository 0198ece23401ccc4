#pragma once

// Special functions behind the partition-probability and transform formulas.

#include "coagfrag/quadrature.hpp"

namespace coagfrag {

/// Thread-safe log Gamma for x > 0.
double log_gamma(double x);

/// prod_{i=0}^{n-1} (x + i * step); the empty product is 1.
double rising_factorial(double x, int n, double step);

/// c_{alpha,theta} = Gamma(theta + 1) / Gamma(theta / alpha + 1) = 1 / E[T^{-theta}]
/// for the positive alpha-stable T with E[e^{-lambda T}] = e^{-lambda^alpha}.
/// Requires 0 < alpha < 1, theta > -alpha.
double stable_tilt_constant(double alpha, double theta);

/// Mittag-Leffler function phi_alpha(q) = sum_k (-q)^k / Gamma(1 + k alpha),
/// 0 < alpha <= 1, q >= 0. Equals E[exp(-q T^{-alpha})] for the stable T.
///
/// Small q uses a compensated series when its largest term is modest; large q
/// uses the spectral representation
///   phi_alpha(q) = sin(alpha pi)/pi * int_0^inf e^{-r q^{1/alpha}} r^{alpha-1}
///                  / (r^{2 alpha} + 2 r^alpha cos(alpha pi) + 1) dr,
/// which has no cancellation.
double mittag_leffler(double alpha, double q);

namespace detail {
/// Raw series branch, no regime checks beyond convergence.
double mittag_leffler_series(double alpha, double q);
/// Raw spectral-integral branch (alpha < 1).
double mittag_leffler_spectral(double alpha, double q);
/// log phi_alpha(q), accurate when phi is tiny.
double log_mittag_leffler(double alpha, double q);
}  // namespace detail

/// Density of the positive alpha-stable law normalized by E[e^{-lambda T}] =
/// e^{-lambda^alpha}, 0 < alpha < 1, t > 0.
///
/// alpha = 1/2 is closed form. Otherwise large t uses the convergent
/// expansion (1/pi) sum_k (-1)^{k+1} Gamma(k alpha + 1)/k! sin(k pi alpha)
/// t^{-k alpha - 1}; the rest uses Zolotarev's integral over (0, pi).
double stable_density(double alpha, double t);

namespace detail {
double stable_density_zolotarev(double alpha, double t);
double stable_density_series(double alpha, double t);
}  // namespace detail

/// R_n(y | alpha) = sum_l Gamma(n + l alpha) / Gamma(1 + l alpha) (-y)^{-l}
///               = int_0^inf s^{n-1} e^{-s} phi_alpha(s^alpha / y) ds.
///
/// Series for y >= 4n. Below that, the spectral form
///   R_n(y | alpha) = Gamma(n) int_0^inf K_alpha(r) (1 + r y^{-1/alpha})^{-n} dr,
///   K_alpha(r) = sin(alpha pi)/pi r^{alpha-1} / (r^{2 alpha} + 2 r^alpha cos(alpha pi) + 1),
/// obtained by inserting the spectral form of phi_alpha into the s-integral
/// and integrating s out. It is a single integral of elementary functions.
double r_kernel(int n, double y, double alpha);

namespace detail {
double r_kernel_series(int n, double y, double alpha);
/// The s-integral with phi from mittag_leffler (nested quadrature).
double r_kernel_integral(int n, double y, double alpha);
double r_kernel_spectral(int n, double y, double alpha);
}  // namespace detail

/// Hermite function h_{-2n}(x) = 2^{n-1} / Gamma(2n) int_0^inf s^{n-1}
/// e^{-s - x sqrt(2s)} ds, n >= 1, x >= 0.
double hermite_function(int n, double x);

/// R_n(y | 1/2) through the Hermite function:
///   Gamma(2n) 2^{-n+3/2} / Gamma(1/2) int_0^inf h_{-2n}(x/y) e^{-x^2/2} dx.
double r_kernel_hermite(int n, double y);

}  // namespace coagfrag
