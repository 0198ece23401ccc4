#include "coagfrag/levy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include <fmt/format.h>

#include "coagfrag/errors.hpp"
#include "coagfrag/quadrature.hpp"
#include "coagfrag/special_functions.hpp"

namespace coagfrag {

LevyModel make_model(std::shared_ptr<const detail::LevyImpl> impl) { return LevyModel(std::move(impl)); }

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_sum_exp(const std::vector<double>& xs) {
  double mx = kNegInf;
  for (double x : xs) mx = std::max(mx, x);
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - mx);
  return mx + std::log(s);
}

double log_or_neg_inf(double v) { return v > 0.0 ? std::log(v) : kNegInf; }

void check_cumulant_order(int m) {
  if (m < 1) throw DomainError(fmt::format("cumulant order m={} must be >= 1", m));
}

class GammaImpl final : public detail::LevyImpl {
public:
  explicit GammaImpl(double nu) : nu_(nu) {}
  std::string spec() const override { return fmt::format("gamma:nu={}", nu_); }
  double psi_at_log(double x) const override {
    // nu ln(1 + e^x) without overflow.
    return nu_ * (x > 30.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)));
  }
  double log_cumulant(int m, double x) const override {
    check_cumulant_order(m);
    const double log1p_lambda = x > 30.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
    return std::log(nu_) + log_gamma(m) - m * log1p_lambda;
  }
  double log_negative_moment(double theta) const override {
    if (!(theta < nu_))
      throw TiltInfeasibleError(fmt::format("gamma model: E[T^-theta] infinite for theta={} >= nu={}", theta, nu_));
    return log_gamma(nu_ - theta) - log_gamma(nu_);
  }
  std::optional<double> total_mass_density(double t) const override {
    if (!(t > 0.0)) return 0.0;
    return std::exp((nu_ - 1.0) * std::log(t) - t - log_gamma(nu_));
  }

private:
  double nu_;
};

class StableImpl final : public detail::LevyImpl {
public:
  explicit StableImpl(double alpha) : alpha_(alpha) {}
  std::string spec() const override { return fmt::format("stable:alpha={}", alpha_); }
  double psi_at_log(double x) const override { return std::exp(alpha_ * x); }
  double log_cumulant(int m, double x) const override {
    check_cumulant_order(m);
    return std::log(alpha_) + log_gamma(m - alpha_) - log_gamma(1.0 - alpha_) + (alpha_ - m) * x;
  }
  double log_negative_moment(double theta) const override {
    if (!(theta > -alpha_))
      throw TiltInfeasibleError(
          fmt::format("stable model: E[T^-theta] infinite for theta={} <= -alpha={}", theta, -alpha_));
    return log_gamma(theta / alpha_ + 1.0) - log_gamma(theta + 1.0);
  }
  std::optional<double> total_mass_density(double t) const override { return stable_density(alpha_, t); }

private:
  double alpha_;
};

class RescaledImpl final : public detail::LevyImpl {
public:
  RescaledImpl(LevyModel base, double c) : base_(std::move(base)), c_(c), log_c_(std::log(c)) {}
  std::string spec() const override { return fmt::format("rescale({};c={})", base_.spec(), c_); }
  double psi_at_log(double x) const override { return base_.psi_at_log(x + log_c_); }
  double log_cumulant(int m, double x) const override { return m * log_c_ + base_.log_cumulant(m, x + log_c_); }
  double log_negative_moment(double theta) const override {
    return -theta * log_c_ + base_.log_negative_moment(theta);
  }
  std::optional<double> total_mass_density(double t) const override {
    auto f = base_.impl().total_mass_density(t / c_);
    if (!f) return std::nullopt;
    return *f / c_;
  }

private:
  LevyModel base_;
  double c_;
  double log_c_;
};

class ComposedImpl final : public detail::LevyImpl {
public:
  static constexpr int kMaxOrder = 40;

  ComposedImpl(LevyModel base, double alpha) : base_(std::move(base)), alpha_(alpha) {
    // c_i = |alpha (alpha-1) ... (alpha-i+1)|.
    std::array<double, kMaxOrder + 1> c{};
    c[1] = alpha;
    for (int i = 2; i <= kMaxOrder; ++i) c[i] = c[i - 1] * (i - 1 - alpha);
    // Partial Bell polynomials B_{m,j}(c) by the standard recurrence.
    std::vector<std::vector<double>> binom(kMaxOrder + 1, std::vector<double>(kMaxOrder + 1, 0.0));
    for (int a = 0; a <= kMaxOrder; ++a) {
      binom[a][0] = 1.0;
      for (int b = 1; b <= a; ++b) binom[a][b] = binom[a - 1][b - 1] + (b <= a - 1 ? binom[a - 1][b] : 0.0);
    }
    bell_.assign(kMaxOrder + 1, std::vector<double>(kMaxOrder + 1, 0.0));
    bell_[0][0] = 1.0;
    for (int m = 1; m <= kMaxOrder; ++m)
      for (int j = 1; j <= m; ++j) {
        double s = 0.0;
        for (int i = 1; i <= m - j + 1; ++i) s += binom[m - 1][i - 1] * c[i] * bell_[m - i][j - 1];
        bell_[m][j] = s;
      }
  }

  std::string spec() const override { return fmt::format("compose({};alpha={})", base_.spec(), alpha_); }
  double psi_at_log(double x) const override { return base_.psi_at_log(alpha_ * x); }
  double log_cumulant(int m, double x) const override {
    check_cumulant_order(m);
    if (m > kMaxOrder) throw UnsupportedError(fmt::format("composed cumulant order {} > {}", m, kMaxOrder));
    std::vector<double> terms;
    terms.reserve(m);
    for (int j = 1; j <= m; ++j)
      terms.push_back(base_.log_cumulant(j, alpha_ * x) + j * alpha_ * x + std::log(bell_[m][j]));
    return -m * x + log_sum_exp(terms);
  }
  double log_negative_moment(double theta) const override {
    // Total mass S * T^{1/alpha} with S stable(alpha) independent of T.
    if (!(theta > -alpha_))
      throw TiltInfeasibleError(fmt::format("composed model: E[S^-theta] infinite for theta={}", theta));
    return log_gamma(theta / alpha_ + 1.0) - log_gamma(theta + 1.0) + base_.log_negative_moment(theta / alpha_);
  }
  std::optional<double> total_mass_density(double t) const override {
    if (!base_.has_total_mass_density()) return std::nullopt;
    if (!(t > 0.0)) return 0.0;
    const double log_t = std::log(t);
    // f(t) = int f_S(t tau^{-1/alpha}) tau^{-1/alpha} f_T(tau) dtau, tau = e^x.
    auto log_f = [&](double x) {
      const double s = std::exp(log_t - x / alpha_);
      if (!(s > 0.0) || !std::isfinite(s)) return kNegInf;
      return log_or_neg_inf(stable_density(alpha_, s)) - x / alpha_ +
             log_or_neg_inf(base_.total_mass_density(std::exp(x)));
    };
    QuadratureSettings q;
    q.rel_tol = 1e-9;
    return std::exp(log_integrate_positive(log_f, q).log_value);
  }

  const LevyModel& base() const { return base_; }
  double alpha() const { return alpha_; }

private:
  LevyModel base_;
  double alpha_;
  std::vector<std::vector<double>> bell_;
};

class LinnikImpl final : public detail::LevyImpl {
public:
  LinnikImpl(double nu, double alpha, LinnikCumulantMethod method)
      : nu_(nu), alpha_(alpha), method_(method),
        composed_(alpha_compose(rescale(gamma_model(nu), 1.0 / nu), alpha)) {}
  std::string spec() const override { return fmt::format("linnik:nu={},alpha={}", nu_, alpha_); }
  double psi_at_log(double x) const override { return composed_.psi_at_log(x); }
  double log_cumulant(int m, double x) const override {
    check_cumulant_order(m);
    switch (method_) {
      case LinnikCumulantMethod::Exact:
        return composed_.log_cumulant(m, x);
      case LinnikCumulantMethod::Series:
        return log_series(m, x);
      case LinnikCumulantMethod::Quadrature:
        return log_quadrature(m, x);
      case LinnikCumulantMethod::Auto:
        break;
    }
    if (std::log(nu_) - alpha_ * x <= std::log(0.5)) return log_series(m, x);
    return log_quadrature(m, x);
  }
  double log_negative_moment(double theta) const override { return composed_.log_negative_moment(theta); }
  std::optional<double> total_mass_density(double t) const override {
    return composed_.impl().total_mass_density(t);
  }

  double log_series(int m, double x) const {
    const double ratio = std::log(nu_) - alpha_ * x;  // log(nu u^-alpha)
    if (!(ratio < 0.0))
      throw EvaluationError(fmt::format("linnik cumulant series diverges: nu u^-alpha = {:.6g} >= 1", std::exp(ratio)));
    double sum = 0.0;
    double comp = 0.0;
    for (int l = 0; l < 20000; ++l) {
      const double lt = log_gamma(m + l * alpha_) - log_gamma(1.0 + l * alpha_) + l * ratio - log_gamma(m);
      const double term = (l % 2 == 0 ? 1.0 : -1.0) * std::exp(lt);
      const double t = sum + term;
      comp += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
      sum = t;
      if (l > 2 && std::abs(term) < 1e-17 * std::abs(sum + comp)) {
        const double total = sum + comp;
        if (!(total > 0.0)) break;
        return std::log(alpha_ * nu_) - m * x + log_gamma(m) + std::log(total);
      }
    }
    throw EvaluationError(fmt::format("linnik cumulant series failed to converge (m={}, log u={})", m, x));
  }

  double log_quadrature(int m, double x) const {
    const double log_nu = std::log(nu_);
    auto log_f = [&](double ls) {  // s = e^ls
      const double q = std::exp(log_nu + alpha_ * ls);
      const double lphi = std::isfinite(q) ? detail::log_mittag_leffler(alpha_, q) : kNegInf;
      return (m - 1) * ls - std::exp(ls + x) + lphi;
    };
    QuadratureSettings s;
    s.rel_tol = 1e-11;
    return std::log(alpha_ * nu_) + log_integrate_positive(log_f, s).log_value;
  }

private:
  double nu_;
  double alpha_;
  LinnikCumulantMethod method_;
  LevyModel composed_;
};

void check_alpha(double alpha, const char* who) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError(fmt::format("{}: alpha={} outside (0,1)", who, alpha));
}

}  // namespace

std::string LevyModel::spec() const { return impl_->spec(); }
double LevyModel::psi(double lambda) const {
  if (lambda < 0.0) throw DomainError("psi: lambda must be >= 0");
  if (lambda == 0.0) return 0.0;
  return impl_->psi_at_log(std::log(lambda));
}
double LevyModel::psi_at_log(double log_lambda) const { return impl_->psi_at_log(log_lambda); }
double LevyModel::cumulant(int m, double lambda) const {
  if (!(lambda > 0.0)) throw DomainError("cumulant: lambda must be positive");
  return std::exp(impl_->log_cumulant(m, std::log(lambda)));
}
double LevyModel::log_cumulant(int m, double log_lambda) const { return impl_->log_cumulant(m, log_lambda); }
double LevyModel::log_negative_moment(double theta) const {
  if (theta == 0.0) return 0.0;
  return impl_->log_negative_moment(theta);
}
bool LevyModel::has_total_mass_density() const { return impl_->total_mass_density(1.0).has_value(); }
double LevyModel::total_mass_density(double t) const {
  auto f = impl_->total_mass_density(t);
  if (!f) throw UnsupportedError(fmt::format("{}: no total-mass density", spec()));
  return *f;
}

LevyModel gamma_model(double nu) {
  if (!(nu > 0.0)) throw DomainError(fmt::format("gamma_model: nu={} must be positive", nu));
  return make_model(std::make_shared<GammaImpl>(nu));
}

LevyModel stable_model(double alpha) {
  check_alpha(alpha, "stable_model");
  return make_model(std::make_shared<StableImpl>(alpha));
}

LevyModel linnik_model(double nu, double alpha, LinnikCumulantMethod method) {
  if (!(nu > 0.0)) throw DomainError(fmt::format("linnik_model: nu={} must be positive", nu));
  check_alpha(alpha, "linnik_model");
  return make_model(std::make_shared<LinnikImpl>(nu, alpha, method));
}

LevyModel alpha_compose(const LevyModel& base, double alpha) {
  check_alpha(alpha, "alpha_compose");
  return make_model(std::make_shared<ComposedImpl>(base, alpha));
}

LevyModel rescale(const LevyModel& base, double c) {
  if (!(c > 0.0) || !std::isfinite(c)) throw DomainError(fmt::format("rescale: c={} must be positive", c));
  return make_model(std::make_shared<RescaledImpl>(base, c));
}

double composed_cumulant_numeric(const LevyModel& base, double alpha, int m, double lambda) {
  check_alpha(alpha, "composed_cumulant_numeric");
  check_cumulant_order(m);
  if (m > 8) throw UnsupportedError(fmt::format("numeric differentiation of order {} > 8 is unsupported", m));
  if (!(lambda > 0.0)) throw DomainError("composed_cumulant_numeric: lambda must be positive");
  auto f = [&](double l) { return base.psi(std::pow(l, alpha)); };
  std::vector<double> binom(m + 1, 1.0);
  for (int i = 1; i <= m; ++i) binom[i] = binom[i - 1] * (m - i + 1) / i;
  auto diff = [&](double h) {
    double s = 0.0;
    for (int i = 0; i <= m; ++i) s += (i % 2 == 0 ? 1.0 : -1.0) * binom[i] * f(lambda + (0.5 * m - i) * h);
    return s / std::pow(h, m);
  };
  constexpr int kLevels = 5;
  std::array<std::array<double, kLevels>, kLevels> table{};
  double h = 0.8 * lambda / m;
  for (int i = 0; i < kLevels; ++i, h *= 0.5) {
    table[i][0] = diff(h);
    double factor = 4.0;
    for (int j = 1; j <= i; ++j, factor *= 4.0)
      table[i][j] = table[i][j - 1] + (table[i][j - 1] - table[i - 1][j - 1]) / (factor - 1.0);
  }
  const double deriv = table[kLevels - 1][kLevels - 1];
  return (m % 2 == 1 ? 1.0 : -1.0) * deriv;
}

double linnik_cumulant_quadrature(double nu, double alpha, int m, double u) {
  LinnikImpl impl(nu, alpha, LinnikCumulantMethod::Quadrature);
  return std::exp(impl.log_quadrature(m, std::log(u)));
}

double linnik_cumulant_series(double nu, double alpha, int m, double u) {
  LinnikImpl impl(nu, alpha, LinnikCumulantMethod::Series);
  return std::exp(impl.log_series(m, std::log(u)));
}

TiltedModel tilt(const LevyModel& base, double theta) {
  const double log_moment = base.log_negative_moment(theta);
  const double m_theta = std::exp(-log_moment);
  if (!(m_theta > 0.0) || !std::isfinite(m_theta))
    throw TiltInfeasibleError(fmt::format("tilt: m_theta not finite for {} at theta={}", base.spec(), theta));
  return {base, theta, m_theta};
}

double tilt_normalizer_by_quadrature(const LevyModel& base, double theta) {
  auto log_f = [&](double x) { return -theta * x + log_or_neg_inf(base.total_mass_density(std::exp(x))); };
  QuadratureSettings s;
  s.rel_tol = 1e-9;
  const double log_moment = log_integrate_positive(log_f, s).log_value;
  if (!std::isfinite(log_moment))
    throw TiltInfeasibleError(fmt::format("tilt: E[T^-theta] not finite for {} at theta={}", base.spec(), theta));
  return std::exp(-log_moment);
}

}  // namespace coagfrag
