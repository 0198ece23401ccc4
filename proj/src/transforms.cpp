#include "coagfrag/transforms.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <thread>

#include <boost/math/special_functions/beta.hpp>
#include <fmt/format.h>

#include "coagfrag/errors.hpp"
#include "coagfrag/quadrature.hpp"
#include "coagfrag/samplers.hpp"
#include "coagfrag/special_functions.hpp"

namespace coagfrag {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::vector<double> parse_list(std::string_view text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find(',', pos), text.size());
    const std::string_view tok = text.substr(pos, end - pos);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size())
      throw DomainError(fmt::format("StepFunction::parse: bad number '{}'", tok));
    out.push_back(v);
    pos = end + 1;
  }
  return out;
}

void check_z(double z) {
  if (!(z >= 0.0)) throw DomainError(fmt::format("transform: z={} must be >= 0", z));
}

double log_sum_exp(std::span<const double> xs) {
  double mx = kNegInf;
  for (double x : xs) mx = std::max(mx, x);
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - mx);
  return mx + std::log(s);
}

/// Sum of integrals over `pieces` equal sub-intervals of [a, b]. A coarse pass
/// fixes the scale of the whole integral so negligible pieces are held to an
/// absolute tolerance instead of an unreachable relative one.
double integrate_pieces(const Integrand& f, double a, double b, int pieces, const QuadratureSettings& s) {
  const double h = (b - a) / pieces;
  QuadratureSettings coarse = s;
  coarse.rel_tol = std::max(s.rel_tol, 1e-4);
  double scale = 0.0;
  for (int i = 0; i < pieces; ++i) {
    try {
      scale += std::abs(integrate_interval(f, a + i * h, a + (i + 1) * h, coarse).value);
    } catch (const ConvergenceError& e) {
      scale += std::abs(e.best_estimate());
    }
  }
  QuadratureSettings fine = s;
  fine.abs_tol = std::max(s.abs_tol, s.rel_tol * scale / pieces);
  double total = 0.0;
  for (int i = 0; i < pieces; ++i) total += integrate_interval(f, a + i * h, a + (i + 1) * h, fine).value;
  return total;
}

QuadratureSettings findim_settings(const FindimOptions& o) {
  QuadratureSettings s;
  s.rel_tol = o.rel_tol;
  s.abs_tol = 1e-300;
  s.max_subdivisions = 400;
  return s;
}

double logistic(double v) { return 1.0 / (1.0 + std::exp(-v)); }

double band_limit(const FindimOptions& o) {
  if (!(o.boundary_band > 0.0 && o.boundary_band < 0.01)) throw DomainError("findim: boundary_band outside (0, 0.01)");
  return std::log((1.0 - o.boundary_band) / o.boundary_band);
}

/// int over z in the 1-simplex (logit coordinates) of
/// f_Q(z, 1-z) Gamma(theta)/(Gamma(theta z)Gamma(theta(1-z))) exp(theta z ly1 + theta (1-z) ly2 + offset).
/// The -ln y_i terms live in `offset` so callers can cancel them exactly.
double mix2(double theta, const SimplexDensity& f_q, double ly1, double ly2, double offset, const FindimOptions& o) {
  const double V = band_limit(o);
  const double lg_theta = log_gamma(theta);
  auto f = [&](double v) {
    const double z1 = logistic(v);
    const double z2 = logistic(-v);
    const double zz[2] = {z1, z2};
    const double fq = f_q(zz);
    if (fq == 0.0) return 0.0;
    const double l =
        lg_theta - log_gamma(theta * z1) - log_gamma(theta * z2) + theta * z1 * ly1 + theta * z2 * ly2 + offset;
    return fq * std::exp(l) * z1 * z2;
  };
  return integrate_pieces(f, -V, V, 24, findim_settings(o));
}

double mix3(double theta, const SimplexDensity& f_q, std::span<const double> ly, const FindimOptions& o) {
  const double V = band_limit(o);
  const double lg_theta = log_gamma(theta);
  QuadratureSettings inner = findim_settings(o);
  QuadratureSettings outer = inner;
  outer.rel_tol = std::max(o.rel_tol, 1e-8);
  inner.rel_tol = outer.rel_tol * 0.1;
  auto outer_f = [&](double v1) {
    const double z1 = logistic(v1);
    const double rest = logistic(-v1);
    auto inner_f = [&](double v2) {
      const double s = logistic(v2);
      const double zz[3] = {z1, rest * s, rest * logistic(-v2)};
      const double fq = f_q(zz);
      if (fq == 0.0) return 0.0;
      double l = lg_theta;
      for (int i = 0; i < 3; ++i) l += (theta * zz[i] - 1.0) * ly[i] - log_gamma(theta * zz[i]);
      return fq * std::exp(l) * z1 * rest * rest * s * logistic(-v2);
    };
    return integrate_pieces(inner_f, -V, V, 12, inner);
  };
  return integrate_pieces(outer_f, -V, V, 12, outer);
}

void check_simplex_point(std::span<const double> y, const char* who) {
  double s = 0.0;
  for (double v : y) {
    if (!(v > 0.0 && v < 1.0)) throw DomainError(fmt::format("{}: coordinate {} not strictly inside (0,1)", who, v));
    s += v;
  }
  if (std::abs(s - 1.0) > 1e-9) throw DomainError(fmt::format("{}: coordinates sum to {:.12g}", who, s));
}

}  // namespace

StepFunction::StepFunction(std::vector<double> values, std::vector<double> weights)
    : values_(std::move(values)), weights_(std::move(weights)) {
  if (values_.empty() || values_.size() != weights_.size())
    throw DomainError("StepFunction: values and weights must be nonempty and of equal length");
  double s = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!(values_[i] > 0.0)) throw DomainError(fmt::format("StepFunction: value {} must be positive", values_[i]));
    if (!(weights_[i] > 0.0)) throw DomainError(fmt::format("StepFunction: weight {} must be positive", weights_[i]));
    s += weights_[i];
  }
  if (std::abs(s - 1.0) > 1e-12) throw DomainError(fmt::format("StepFunction: weights sum to {:.17g}", s));
}

StepFunction StepFunction::parse(std::string_view text) {
  const std::size_t semi = text.find(';');
  if (semi == std::string_view::npos || text.substr(0, 2) != "g=" || text.substr(semi + 1, 2) != "w=")
    throw DomainError(fmt::format("StepFunction::parse: expected 'g=...;w=...', got '{}'", text));
  return StepFunction(parse_list(text.substr(2, semi - 2)), parse_list(text.substr(semi + 3)));
}

double StepFunction::mean() const {
  double s = 0.0;
  for (std::size_t i = 0; i < size(); ++i) s += weights_[i] * values_[i];
  return s;
}

double cs_dirichlet(double theta, double z, const StepFunction& g) {
  if (!(theta > 0.0)) throw DomainError("cs_dirichlet: theta must be positive");
  check_z(z);
  double l = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) l += g.weights()[i] * std::log1p(z * g.values()[i]);
  return std::exp(-theta * l);
}

double cs_pd(double alpha, double theta, double z, const StepFunction& g) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("cs_pd: alpha outside (0,1)");
  if (theta == 0.0 || !(theta > -alpha)) throw DomainError("cs_pd: requires theta != 0 and theta > -alpha");
  check_z(z);
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) s += g.weights()[i] * std::pow(1.0 + z * g.values()[i], alpha);
  return std::pow(s, -theta / alpha);
}

double cs_stable(double alpha, double z, const StepFunction& g) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("cs_stable: alpha outside (0,1)");
  check_z(z);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double c = 1.0 + z * g.values()[i];
    num += g.weights()[i] * std::pow(c, alpha - 1.0);
    den += g.weights()[i] * std::pow(c, alpha);
  }
  return num / den;
}

namespace detail {

double cs_pk_tilted_by_parts(const LevyModel& model, double theta, double z, const StepFunction& g) {
  if (!(theta > -1.0)) throw DomainError("cs_pk_tilted: theta must exceed -1");
  check_z(z);
  const double log_m = -model.log_negative_moment(theta);
  std::vector<double> log_c(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) log_c[i] = std::log1p(z * g.values()[i]);
  std::vector<double> terms(g.size());
  auto log_f = [&](double x) {
    double exponent = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      exponent += g.weights()[i] * model.psi_at_log(x + log_c[i]);
      terms[i] = std::log(g.weights()[i]) + log_c[i] + model.log_cumulant(1, x + log_c[i]);
    }
    return theta * x - exponent + log_sum_exp(terms);
  };
  QuadratureSettings s;
  s.rel_tol = 1e-11;
  const double l = log_integrate_positive(log_f, s).log_value;
  return std::exp(log_m - log_gamma(theta + 1.0) + l);
}

}  // namespace detail

double cs_pk_tilted(const LevyModel& model, double theta, double z, const StepFunction& g) {
  if (theta == 0.0) throw DomainError("cs_pk_tilted: theta must be nonzero");
  if (theta < 0.0) return detail::cs_pk_tilted_by_parts(model, theta, z, g);
  check_z(z);
  const double log_m = -model.log_negative_moment(theta);
  std::vector<double> log_c(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) log_c[i] = std::log1p(z * g.values()[i]);
  auto log_f = [&](double x) {
    double exponent = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) exponent += g.weights()[i] * model.psi_at_log(x + log_c[i]);
    return (theta - 1.0) * x - exponent;
  };
  QuadratureSettings s;
  s.rel_tol = 1e-11;
  const double l = log_integrate_positive(log_f, s).log_value;
  return std::exp(log_m - log_gamma(theta) + l);
}

StepFunction alpha_transformed(const StepFunction& g, double alpha, double z) {
  if (!(z > 0.0)) throw DomainError("alpha_transformed: z must be positive");
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) v[i] = std::expm1(alpha * std::log1p(z * g.values()[i]));
  return StepFunction(std::move(v), std::vector<double>(g.weights().begin(), g.weights().end()));
}

namespace {

struct RunningStats {
  long count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++count;
    const double d = x - mean;
    mean += d / count;
    m2 += d * (x - mean);
  }
  void merge(const RunningStats& o) {
    if (o.count == 0) return;
    const long total = count + o.count;
    const double d = o.mean - mean;
    mean += d * o.count / total;
    m2 += o.m2 + d * d * static_cast<double>(count) * o.count / total;
    count = total;
  }
};

/// One realization of tau(g).
double draw_functional(const McLaw& law, const StepFunction& g, double tail_tol, RngStream& rng) {
  const auto values = g.values();
  if (const auto* pd = std::get_if<PdLaw>(&law)) {
    const StickSequence s = gem_sequence(pd->alpha, pd->theta, tail_tol, rng);
    double x = s.tail * g.mean();
    for (double p : s.sticks) x += p * values[rng.categorical(g.weights())];
    return x;
  }
  const auto& c = std::get<ComposedPdLaw>(law);
  const StickSequence qs = gem_sequence(c.q.alpha, c.q.theta, tail_tol, rng);
  std::vector<double> cell_mass(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) cell_mass[i] = qs.tail * g.weights()[i];
  for (double q : qs.sticks) cell_mass[rng.categorical(g.weights())] += q;
  double q_mean = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) q_mean += cell_mass[i] * values[i];
  const StickSequence ps = gem_sequence(c.p.alpha, c.p.theta, tail_tol, rng);
  double x = ps.tail * q_mean;
  for (double p : ps.sticks) x += p * values[rng.categorical(cell_mass)];
  return x;
}

}  // namespace

std::vector<McEstimate> cs_monte_carlo(const McLaw& law, double q, std::span<const double> zs,
                                       const StepFunction& g, const RngStream& rng, const McOptions& options) {
  if (options.samples < 1) throw DomainError("cs_monte_carlo: samples must be >= 1");
  if (options.chunk_size < 1) throw DomainError("cs_monte_carlo: chunk_size must be >= 1");
  for (double z : zs) check_z(z);
  const long chunks = (options.samples + options.chunk_size - 1) / options.chunk_size;
  std::vector<std::vector<RunningStats>> per_chunk(chunks, std::vector<RunningStats>(zs.size()));

  std::atomic<long> next{0};
  auto worker = [&] {
    for (long c = next++; c < chunks; c = next++) {
      RngStream stream = rng.derive(static_cast<std::uint64_t>(c));
      const long begin = c * options.chunk_size;
      const long end = std::min(options.samples, begin + options.chunk_size);
      for (long i = begin; i < end; ++i) {
        const double x = draw_functional(law, g, options.tail_tol, stream);
        for (std::size_t k = 0; k < zs.size(); ++k) per_chunk[c][k].add(std::exp(-q * std::log1p(zs[k] * x)));
      }
    }
  };
  int threads = options.threads > 0 ? options.threads : static_cast<int>(std::thread::hardware_concurrency());
  threads = static_cast<int>(std::clamp<long>(threads, 1, chunks));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::vector<McEstimate> out;
  for (std::size_t k = 0; k < zs.size(); ++k) {
    RunningStats total;
    for (long c = 0; c < chunks; ++c) total.merge(per_chunk[c][k]);
    const double var = total.count > 1 ? total.m2 / (total.count - 1) : 0.0;
    out.push_back({zs[k], total.mean, std::sqrt(var / total.count)});
  }
  return out;
}

McEstimate cs_monte_carlo(const McLaw& law, double q, double z, const StepFunction& g, const RngStream& rng,
                          const McOptions& options) {
  const double zs[1] = {z};
  return cs_monte_carlo(law, q, zs, g, rng, options).front();
}

double dirichlet_density(std::span<const double> concentrations, std::span<const double> y) {
  if (concentrations.size() != y.size()) throw DomainError("dirichlet_density: dimension mismatch");
  double total = 0.0;
  double l = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!(concentrations[i] > 0.0)) throw DomainError("dirichlet_density: concentrations must be positive");
    total += concentrations[i];
    l += (concentrations[i] - 1.0) * std::log(y[i]) - log_gamma(concentrations[i]);
  }
  return std::exp(l + log_gamma(total));
}

double carlton_density(double eta, std::span<const double> p, std::span<const double> z) {
  if (!(eta > -0.5)) throw DomainError(fmt::format("carlton_density: eta={} must exceed -1/2", eta));
  if (p.size() != z.size() || p.empty()) throw DomainError("carlton_density: dimension mismatch");
  const double m = static_cast<double>(p.size());
  double l = log_gamma(eta + 0.5 * m) - 0.5 * (m - 1.0) * std::log(std::numbers::pi) - log_gamma(eta + 0.5);
  double q = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    l += std::log(p[i]) - 1.5 * std::log(z[i]);
    q += p[i] * p[i] / z[i];
  }
  return std::exp(l - (eta + 0.5 * m) * std::log(q));
}

double findim_density_composed(double theta, const SimplexDensity& f_q, std::span<const double> y,
                               const FindimOptions& options) {
  if (!(theta > 0.0)) throw DomainError("findim_density_composed: theta must be positive");
  if (y.size() < 2 || y.size() > 3)
    throw UnsupportedError(fmt::format("findim_density_composed: dimension m={} not in {{2,3}}", y.size()));
  check_simplex_point(y, "findim_density_composed");
  if (y.size() == 2) {
    const double ly1 = std::log(y[0]);
    const double ly2 = std::log(y[1]);
    return mix2(theta, f_q, ly1, ly2, -ly1 - ly2, options);
  }
  const double ly[3] = {std::log(y[0]), std::log(y[1]), std::log(y[2])};
  return mix3(theta, f_q, ly, options);
}

double findim_density_pd_half(double theta, double eta, std::span<const double> p, std::span<const double> y,
                              const FindimOptions& options) {
  std::vector<double> pv(p.begin(), p.end());
  SimplexDensity f = [eta, pv](std::span<const double> z) { return carlton_density(eta, pv, z); };
  if (p.size() != y.size()) throw DomainError("findim_density_pd_half: dimension mismatch");
  return findim_density_composed(theta, f, y, options);
}

double findim_cdf_composed(double theta, const SimplexDensity& f_q, double y1, const FindimOptions& options) {
  if (!(theta > 0.0)) throw DomainError("findim_cdf_composed: theta must be positive");
  if (y1 <= 0.0) return 0.0;
  if (y1 >= 1.0) return 1.0;
  const double V = band_limit(options);
  auto f = [&](double v) {
    const double z1 = logistic(v);
    const double z2 = logistic(-v);
    const double zz[2] = {z1, z2};
    return f_q(zz) * boost::math::ibeta(theta * z1, theta * z2, y1) * z1 * z2;
  };
  return integrate_pieces(f, -V, V, 24, findim_settings(options));
}

double findim_total_mass(double theta, const SimplexDensity& f_q, const FindimOptions& options) {
  if (!(theta > 0.0)) throw DomainError("findim_total_mass: theta must be positive");
  // Half of the simplex nearest vertex `side`: y_side = exp(-u), u = e^s, u in (ln 2, 1e9).
  auto half = [&](int side) {
    auto f = [&](double s) {
      const double u = std::exp(s);
      const double ly_small = -u;
      const double ly_big = std::log1p(-std::exp(-u));
      // dy = y du and du = u ds cancel the 1/y_small of the density.
      const double offset = s - ly_big;
      return side == 0 ? mix2(theta, f_q, ly_small, ly_big, offset, options)
                       : mix2(theta, f_q, ly_big, ly_small, offset, options);
    };
    QuadratureSettings s;
    s.rel_tol = 1e-8;
    s.abs_tol = 1e-300;
    return integrate_pieces(f, std::log(std::log(2.0)), std::log(1e9), 12, s);
  };
  return half(0) + half(1);
}

}  // namespace coagfrag
