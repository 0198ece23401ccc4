#pragma once

// Coagulation and fragmentation kernels on ranked masses and on set
// partitions, and the composed sampler for tau_P o tau_Q.

#include "coagfrag/partition.hpp"
#include "coagfrag/rng.hpp"
#include "coagfrag/samplers.hpp"

namespace coagfrag {

struct CoagOptions {
  /// Largest q.tail accepted; the q intervals must (nearly) cover [0, 1].
  double max_q_tail = 1e-6;
  /// Treat the uncovered part of [0, 1] as infinitely many tiny intervals:
  /// p-masses whose marker lands there stay unmerged. When false the
  /// uncovered part is one extra interval.
  bool q_tail_as_dust = false;
};

/// COAG kernel: iid uniform markers U_i for the p-masses, the interval
/// partition of [0, 1] with lengths q.masses, and the ranked sums of p-masses
/// per interval. p.tail travels as one pseudo-atom with its own marker.
/// Throws DomainError when q.tail exceeds options.max_q_tail.
RankedMasses coag_masses(const RankedMasses& p, const RankedMasses& q, RngStream& rng,
                         const CoagOptions& options = {});

/// Merges the blocks of `fine` that share a block of `grouping`, a partition
/// of fine's blocks (indexed by first appearance).
SetPartition coag_partition(const SetPartition& fine, const SetPartition& grouping);

/// FRAG kernel: every p_i is split by an independent draw from q_sampler and
/// the pieces are ranked. Fragment tails join the output tail.
RankedMasses frag_masses(const RankedMasses& p, const MassSampler& q_sampler, RngStream& rng);

/// Re-partitions each block of `coarse` by an independent block_sampler draw.
/// Throws ContractError when the sampler returns the wrong ground-set size.
SetPartition frag_partition(const SetPartition& coarse, const PartitionSampler& block_sampler, RngStream& rng);

/// fine ~ CRP(alpha, theta) on [n], grouping of its K blocks ~ q_sampler(K),
/// returns coag_partition(fine, grouping).
SetPartition compose_coagulated_sample(double alpha, double theta, const PartitionSampler& q_sampler, int n,
                                       RngStream& rng);

}  // namespace coagfrag
