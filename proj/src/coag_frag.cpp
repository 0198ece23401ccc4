#include "coagfrag/coag_frag.hpp"

#include <algorithm>
#include <vector>

#include <fmt/format.h>

#include "coagfrag/errors.hpp"

namespace coagfrag {

RankedMasses coag_masses(const RankedMasses& p, const RankedMasses& q, RngStream& rng, const CoagOptions& options) {
  if (q.tail() > options.max_q_tail)
    throw DomainError(fmt::format("coag_masses: q.tail={:.3g} exceeds {:.3g}; the intervals do not cover [0,1]",
                                  q.tail(), options.max_q_tail));
  std::vector<double> cumulative;
  cumulative.reserve(q.size());
  double c = 0.0;
  for (double m : q.masses()) cumulative.push_back(c += m);

  std::vector<double> merged(q.size() + 1, 0.0);  // last slot: the uncovered remainder
  std::vector<double> loose;
  auto place = [&](double mass) {
    const double u = rng.uniform();
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    if (it != cumulative.end()) {
      merged[it - cumulative.begin()] += mass;
    } else if (options.q_tail_as_dust) {
      loose.push_back(mass);
    } else {
      merged.back() += mass;
    }
  };
  for (double m : p.masses()) place(m);
  if (p.tail() > 0.0) place(p.tail());
  merged.insert(merged.end(), loose.begin(), loose.end());
  return rank(merged);
}

SetPartition coag_partition(const SetPartition& fine, const SetPartition& grouping) {
  if (grouping.n() != fine.num_blocks())
    throw DomainError(fmt::format("coag_partition: grouping over {} items but fine has {} blocks", grouping.n(),
                                  fine.num_blocks()));
  std::vector<int> labels(fine.n());
  for (int i = 0; i < fine.n(); ++i) labels[i] = grouping.block_of(fine.block_of(i));
  return SetPartition::from_labels(labels);
}

RankedMasses frag_masses(const RankedMasses& p, const MassSampler& q_sampler, RngStream& rng) {
  std::vector<double> pieces;
  for (double pi : p.masses()) {
    const RankedMasses q = q_sampler(rng);
    for (double qj : q.masses()) pieces.push_back(pi * qj);
  }
  return rank(pieces);
}

SetPartition frag_partition(const SetPartition& coarse, const PartitionSampler& block_sampler, RngStream& rng) {
  std::vector<int> labels(coarse.n());
  int offset = 0;
  for (const std::vector<int>& block : coarse.blocks()) {
    const int m = static_cast<int>(block.size());
    const SetPartition sub = block_sampler(m, rng);
    if (sub.n() != m)
      throw ContractError(fmt::format("frag_partition: block sampler returned {} elements for a block of {}", sub.n(), m));
    for (int i = 0; i < m; ++i) labels[block[i]] = offset + sub.block_of(i);
    offset += sub.num_blocks();
  }
  return SetPartition::from_labels(labels);
}

SetPartition compose_coagulated_sample(double alpha, double theta, const PartitionSampler& q_sampler, int n,
                                       RngStream& rng) {
  const SetPartition fine = crp_partition(alpha, theta, n, rng);
  const SetPartition grouping = q_sampler(fine.num_blocks(), rng);
  return coag_partition(fine, grouping);
}

}  // namespace coagfrag
