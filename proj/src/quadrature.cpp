#include "coagfrag/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

#include "coagfrag/errors.hpp"

namespace coagfrag {

namespace {

using Kronrod = boost::math::quadrature::gauss_kronrod<double, 21>;
using Gauss = boost::math::quadrature::gauss<double, 10>;

struct Segment {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

Segment gk21(const Integrand& f, double a, double b) {
  const auto& x = Kronrod::abscissa();
  const auto& wk = Kronrod::weights();
  const auto& wg = Gauss::weights();
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  const double f0 = f(mid);
  double kronrod = f0 * wk[0];
  double gauss = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double fp = f(mid + half * x[i]);
    const double fm = f(mid - half * x[i]);
    kronrod += (fp + fm) * wk[i];
    if (i % 2 == 1) gauss += (fp + fm) * wg[i / 2];
  }
  if (!std::isfinite(kronrod))
    throw EvaluationError(fmt::format("quadrature: non-finite integrand on [{:.6g}, {:.6g}]", a, b));
  const double value = kronrod * half;
  const double err = std::max(std::abs((kronrod - gauss) * half),
                              std::abs(value) * 2.0 * std::numeric_limits<double>::epsilon());
  return {a, b, value, err};
}

}  // namespace

void QuadratureSettings::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw DomainError("QuadratureSettings: tolerances must be positive");
  if (max_subdivisions < 1) throw DomainError("QuadratureSettings: max_subdivisions must be >= 1");
}

QuadratureResult integrate_interval(const Integrand& f, double a, double b, const QuadratureSettings& settings) {
  settings.validate();
  if (a == b) return {};
  if (!std::isfinite(a) || !std::isfinite(b)) throw DomainError("integrate_interval: endpoints must be finite");
  const double sign = b > a ? 1.0 : -1.0;
  if (b < a) std::swap(a, b);

  std::priority_queue<Segment> heap;
  Segment first = gk21(f, a, b);
  double total = first.value;
  double total_err = first.error;
  heap.push(first);
  int subdivisions = 1;
  // Segments too narrow to split any further; their error is frozen.
  double frozen_err = 0.0;
  double frozen_value = 0.0;

  auto tolerance = [&] { return std::max(settings.abs_tol, settings.rel_tol * std::abs(total)); };

  while (total_err > tolerance()) {
    if (heap.empty()) break;
    if (subdivisions >= settings.max_subdivisions) {
      throw ConvergenceError(
          fmt::format("integrate_interval: tolerance {:.3g} not reached after {} subdivisions (error {:.3g})",
                      tolerance(), subdivisions, total_err),
          sign * total, total_err);
    }
    Segment worst = heap.top();
    heap.pop();
    const double m = 0.5 * (worst.a + worst.b);
    if (!(m > worst.a && m < worst.b) || (worst.b - worst.a) < 1e-15 * std::max(1.0, std::abs(m))) {
      frozen_err += worst.error;
      frozen_value += worst.value;
      continue;
    }
    Segment left = gk21(f, worst.a, m);
    Segment right = gk21(f, m, worst.b);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++subdivisions;
  }
  // Recompute from the segments to shed accumulated rounding in the running sums.
  double value = frozen_value;
  double err = frozen_err;
  while (!heap.empty()) {
    value += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  if (frozen_err > tolerance())
    throw ConvergenceError("integrate_interval: interval width exhausted before tolerance", sign * value, err);
  return {sign * value, err, subdivisions};
}

QuadratureResult integrate_semiinfinite(const Integrand& f, const QuadratureSettings& settings) {
  auto mapped = [&f](double u) {
    const double one_minus = 1.0 - u;
    const double x = u / one_minus;
    const double v = f(x);
    if (v == 0.0) return 0.0;
    return v / (one_minus * one_minus);
  };
  return integrate_interval(mapped, 0.0, 1.0, settings);
}

LogQuadratureResult log_integrate_positive(const Integrand& log_f, const QuadratureSettings& settings) {
  settings.validate();
  constexpr double kDrop = 46.0;      // e^-46 ~ 1e-20 relative to the peak
  constexpr double kLimit = 700.0;    // |log lambda| beyond this is never needed
  auto h = [&log_f](double x) {
    const double v = log_f(x) + x;
    if (std::isnan(v)) throw EvaluationError(fmt::format("log_integrate_positive: NaN at log-lambda {:.6g}", x));
    return v;
  };

  // Coarse grid to locate the bulk of the mass.
  double best_x = 0.0;
  double best_h = -std::numeric_limits<double>::infinity();
  for (double x = -24.0; x <= 24.0; x += 2.0) {
    const double v = h(x);
    if (v > best_h) {
      best_h = v;
      best_x = x;
    }
  }
  // Walk outward from the best grid point; step grows geometrically once the
  // integrand is clearly decreasing.
  auto walk = [&](double dir) {
    double x = best_x;
    double step = 0.5;
    double last = best_h;
    while (std::abs(x) < kLimit) {
      x += dir * step;
      const double v = h(x);
      if (v > best_h) {
        best_h = v;
        best_x = x;
      }
      if (v < best_h - kDrop && v <= last) return x;
      if (v < last) step = std::min(step * 1.25, 8.0);
      last = v;
    }
    return std::clamp(x, -kLimit, kLimit);
  };
  double left = walk(-1.0);
  double right = walk(1.0);
  // A late maximum found while walking right may move the left cut.
  if (h(left) > best_h - kDrop) left = walk(-1.0);

  if (!std::isfinite(best_h)) {
    if (best_h < 0) return {-std::numeric_limits<double>::infinity(), 0.0};
    throw EvaluationError("log_integrate_positive: integrand overflow");
  }

  // Refine the peak location with a golden-section search for the split point.
  {
    double a = best_x - 1.0;
    double b = best_x + 1.0;
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - g * (b - a);
    double d = a + g * (b - a);
    double hc = h(c);
    double hd = h(d);
    for (int it = 0; it < 30; ++it) {
      if (hc > hd) {
        b = d;
        d = c;
        hd = hc;
        c = b - g * (b - a);
        hc = h(c);
      } else {
        a = c;
        c = d;
        hc = hd;
        d = a + g * (b - a);
        hd = h(d);
      }
    }
    const double xm = 0.5 * (a + b);
    const double hm = h(xm);
    if (hm > best_h) {
      best_h = hm;
      best_x = xm;
    }
  }
  best_x = std::clamp(best_x, left, right);

  const double shift = best_h;
  auto scaled = [&](double x) { return std::exp(h(x) - shift); };
  QuadratureSettings inner = settings;
  inner.abs_tol = std::min(settings.abs_tol, 1e-14);
  QuadratureResult lo = integrate_interval(scaled, left, best_x, inner);
  QuadratureResult hi = integrate_interval(scaled, best_x, right, inner);
  const double total = lo.value + hi.value;
  if (!(total > 0.0)) throw EvaluationError("log_integrate_positive: integral is not positive");
  return {std::log(total) + shift, (lo.error + hi.error) / total};
}

}  // namespace coagfrag
