#include "coagfrag/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "coagfrag/errors.hpp"

namespace coagfrag {

namespace {

void check_pd_params(double alpha, double theta, const char* who) {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw DomainError(fmt::format("{}: alpha={} outside [0,1)", who, alpha));
  if (!(theta > -alpha)) throw DomainError(fmt::format("{}: theta={} must exceed -alpha={}", who, theta, -alpha));
}

constexpr long kMaxSticks = 100'000'000;

}  // namespace

SetPartition crp_partition(double alpha, double theta, int n, RngStream& rng) {
  check_pd_params(alpha, theta, "crp_partition");
  if (n < 1) throw DomainError("crp_partition: n must be >= 1");
  std::vector<int> assignment(n, 0);
  std::vector<int> sizes{1};
  for (int i = 1; i < n; ++i) {
    const int k = static_cast<int>(sizes.size());
    double u = rng.uniform() * (theta + i);
    int chosen = k;  // new block unless u lands on an existing one
    for (int j = 0; j < k; ++j) {
      const double w = sizes[j] - alpha;
      if (u < w) {
        chosen = j;
        break;
      }
      u -= w;
    }
    if (chosen == k) sizes.push_back(0);
    ++sizes[chosen];
    assignment[i] = chosen;
  }
  return SetPartition(std::move(assignment));
}

PartitionSampler crp_sampler(double alpha, double theta) {
  check_pd_params(alpha, theta, "crp_sampler");
  return [alpha, theta](int n, RngStream& rng) { return crp_partition(alpha, theta, n, rng); };
}

StickSequence gem_sequence(double alpha, double theta, double tail_tol, RngStream& rng) {
  check_pd_params(alpha, theta, "gem_sticks");
  if (!(tail_tol > 0.0 && tail_tol < 0.1)) throw DomainError(fmt::format("gem_sticks: tail_tol={} outside (0, 0.1)", tail_tol));
  StickSequence out;
  double remaining = 1.0;
  // Sticks below the dust threshold end up in the ranked tail, so they count
  // against tail_tol too.
  double dust = 0.0;
  for (long i = 1; remaining + dust >= tail_tol; ++i) {
    if (i > kMaxSticks) throw EvaluationError("gem_sticks: stick budget exhausted before reaching tail_tol");
    const double v = rng.beta(1.0 - alpha, theta + i * alpha);
    const double stick = remaining * v;
    out.sticks.push_back(stick);
    if (stick < kDustThreshold) dust += stick;
    remaining *= 1.0 - v;
  }
  out.tail = remaining;
  return out;
}

RankedMasses gem_sticks(double alpha, double theta, double tail_tol, RngStream& rng) {
  StickSequence s = gem_sequence(alpha, theta, tail_tol, rng);
  return rank(s.sticks);
}

PredictiveEppfSampler::PredictiveEppfSampler(EppfFunction eppf, double tolerance)
    : eppf_(std::move(eppf)), tolerance_(tolerance) {}

double PredictiveEppfSampler::eppf(const SizeComposition& sizes) const {
  {
    std::lock_guard lock(mutex_);
    auto it = cache_.find(sizes);
    if (it != cache_.end()) return it->second;
  }
  const double v = eppf_(sizes);
  std::lock_guard lock(mutex_);
  cache_.emplace(sizes, v);
  return v;
}

double PredictiveEppfSampler::max_weight_defect() const {
  std::lock_guard lock(mutex_);
  return max_defect_;
}

SetPartition PredictiveEppfSampler::sample(int n, RngStream& rng) const {
  if (n < 1) throw DomainError("eppf_predictive_partition: n must be >= 1");
  std::vector<int> assignment(n, 0);
  std::vector<int> block_sizes{1};
  std::vector<double> weights;
  for (int i = 1; i < n; ++i) {
    const SizeComposition current(block_sizes);
    const double base = eppf(current);
    if (!(base > 0.0))
      throw ConsistencyError(fmt::format("predictive sampler: EPPF vanishes at ({})", current.key()));
    const int k = static_cast<int>(block_sizes.size());
    weights.assign(k + 1, 0.0);
    for (int j = 0; j < k; ++j) {
      // Equal sizes share a predictive weight; reuse it.
      auto same = std::find(block_sizes.begin(), block_sizes.begin() + j, block_sizes[j]);
      if (same != block_sizes.begin() + j) {
        weights[j] = weights[same - block_sizes.begin()];
        continue;
      }
      std::vector<int> grown = block_sizes;
      ++grown[j];
      weights[j] = eppf(SizeComposition(std::move(grown))) / base;
    }
    weights[k] = eppf(current.with_singleton()) / base;
    double total = 0.0;
    for (double& w : weights) {
      if (w < -tolerance_)
        throw ConsistencyError(fmt::format("predictive sampler: negative weight {:.3g} at ({})", w, current.key()));
      w = std::max(w, 0.0);
      total += w;
    }
    const double defect = std::abs(total - 1.0);
    {
      std::lock_guard lock(mutex_);
      max_defect_ = std::max(max_defect_, defect);
    }
    if (defect > tolerance_)
      throw ConsistencyError(
          fmt::format("predictive sampler: weights sum to {:.12g} at ({})", total, current.key()));
    const std::size_t chosen = rng.categorical(weights);
    if (chosen == static_cast<std::size_t>(k)) block_sizes.push_back(0);
    ++block_sizes[chosen];
    assignment[i] = static_cast<int>(chosen);
  }
  return SetPartition(std::move(assignment));
}

SetPartition eppf_predictive_partition(const EppfFunction& eppf, int n, RngStream& rng) {
  return PredictiveEppfSampler(eppf).sample(n, rng);
}

std::vector<double> dirichlet_vector(std::span<const double> concentrations, RngStream& rng) {
  if (concentrations.empty()) throw DomainError("dirichlet_vector: no concentrations");
  std::vector<double> log_g(concentrations.size());
  for (std::size_t i = 0; i < concentrations.size(); ++i) {
    const double a = concentrations[i];
    if (!(a > 0.0)) throw DomainError(fmt::format("dirichlet_vector: concentration {} must be positive", a));
    // Gamma(a) = Gamma(a + 1) U^{1/a} keeps small shapes representable in log form.
    log_g[i] = a < 1.0 ? std::log(rng.gamma(a + 1.0)) + std::log(rng.uniform()) / a : std::log(rng.gamma(a));
  }
  const double mx = *std::max_element(log_g.begin(), log_g.end());
  double total = 0.0;
  for (double& v : log_g) {
    v = std::exp(v - mx);
    total += v;
  }
  for (double& v : log_g) v /= total;
  return log_g;
}

SetPartition paintbox_partition(const RankedMasses& masses, int n, RngStream& rng) {
  if (n < 1) throw DomainError("paintbox_partition: n must be >= 1");
  std::vector<double> cumulative;
  cumulative.reserve(masses.size());
  double c = 0.0;
  for (double m : masses.masses()) cumulative.push_back(c += m);
  std::vector<int> labels(n);
  int next_dust = static_cast<int>(masses.size());
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    labels[i] = it == cumulative.end() ? next_dust++ : static_cast<int>(it - cumulative.begin());
  }
  return SetPartition::from_labels(labels);
}

}  // namespace coagfrag
