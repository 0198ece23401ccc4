#pragma once

// Random partitions and mass sequences: Chinese restaurant process, GEM stick
// breaking, EPPF predictive sampling and Dirichlet vectors.

#include <functional>
#include <map>
#include <mutex>
#include <span>
#include <vector>

#include "coagfrag/partition.hpp"
#include "coagfrag/rng.hpp"

namespace coagfrag {

/// Draws a partition of [n] for a given n.
using PartitionSampler = std::function<SetPartition(int n, RngStream& rng)>;
/// Draws a mass sequence.
using MassSampler = std::function<RankedMasses(RngStream& rng)>;
/// Evaluates an EPPF at a size composition.
using EppfFunction = std::function<double(const SizeComposition&)>;

/// Two-parameter Chinese restaurant process: element i+1 joins a block of size
/// n_j with probability (n_j - alpha)/(theta + i), or opens a new block with
/// probability (theta + k alpha)/(theta + i). Requires 0 <= alpha < 1,
/// theta > -alpha, n >= 1.
SetPartition crp_partition(double alpha, double theta, int n, RngStream& rng);

/// Sampler closure for crp_partition(alpha, theta, ., .).
PartitionSampler crp_sampler(double alpha, double theta);

/// Stick lengths in size-biased order plus the untouched remainder.
struct StickSequence {
  std::vector<double> sticks;
  double tail = 0.0;
};

/// GEM(alpha, theta) stick breaking: V_i ~ Beta(1 - alpha, theta + i alpha),
/// stopped once the remaining mass plus the dust (sticks below kDustThreshold)
/// drops below tail_tol in (0, 0.1).
StickSequence gem_sequence(double alpha, double theta, double tail_tol, RngStream& rng);

/// gem_sequence ranked, the remainder recorded as the tail.
RankedMasses gem_sticks(double alpha, double theta, double tail_tol, RngStream& rng);

/// Sequential sampler driven by an arbitrary EPPF through its predictive
/// ratios p(.., n_j + 1, ..)/p(..) and p(.., 1)/p(..). EPPF values are memoized
/// by SizeComposition (thread-safe). Throws ConsistencyError, naming the
/// composition, when a predictive weight is below -1e-6 or the weights do not
/// sum to 1 within 1e-6.
class PredictiveEppfSampler {
public:
  explicit PredictiveEppfSampler(EppfFunction eppf, double tolerance = 1e-6);

  SetPartition sample(int n, RngStream& rng) const;
  /// Memoized EPPF value.
  double eppf(const SizeComposition& sizes) const;
  /// Largest |sum of predictive weights - 1| seen so far.
  double max_weight_defect() const;

private:
  EppfFunction eppf_;
  double tolerance_;
  mutable std::mutex mutex_;
  mutable std::map<SizeComposition, double> cache_;
  mutable double max_defect_ = 0.0;
};

/// One draw from PredictiveEppfSampler(eppf).
SetPartition eppf_predictive_partition(const EppfFunction& eppf, int n, RngStream& rng);

/// Dirichlet(concentrations) point on the simplex. Small concentrations are
/// handled in log space so that no coordinate underflows to an all-zero draw.
std::vector<double> dirichlet_vector(std::span<const double> concentrations, RngStream& rng);

/// Partition of [n] induced by iid draws from the masses: elements choosing
/// the same mass share a block; draws landing in the tail are singletons.
SetPartition paintbox_partition(const RankedMasses& masses, int n, RngStream& rng);

}  // namespace coagfrag
