#include "coagfrag/partition.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "coagfrag/errors.hpp"

namespace coagfrag {

namespace {

double neumaier_sum(std::span<const double> xs) {
  double sum = 0.0;
  double comp = 0.0;
  for (double x : xs) {
    const double t = sum + x;
    comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  return sum + comp;
}

}  // namespace

RankedMasses::RankedMasses(std::vector<double> masses, double tail)
    : masses_(std::move(masses)), tail_(tail) {
  if (!(tail_ >= 0.0)) throw DomainError(fmt::format("RankedMasses: negative tail {}", tail_));
  for (std::size_t i = 0; i < masses_.size(); ++i) {
    if (!(masses_[i] >= 0.0)) throw DomainError("RankedMasses: negative mass");
    if (i > 0 && masses_[i] > masses_[i - 1]) throw DomainError("RankedMasses: masses not decreasing");
  }
  if (std::abs(total() - 1.0) > 1e-12)
    throw DomainError(fmt::format("RankedMasses: masses + tail = {:.17g}, expected 1", total()));
}

double RankedMasses::total() const noexcept { return neumaier_sum(masses_) + tail_; }

RankedMasses rank(std::span<const double> values) {
  double sum = 0.0;
  for (double v : values) {
    if (!(v >= 0.0)) throw DomainError(fmt::format("rank: negative or NaN entry {}", v));
  }
  sum = neumaier_sum(values);
  if (sum > 1.0 + 1e-9) throw DomainError(fmt::format("rank: entries sum to {:.17g} > 1", sum));

  std::vector<double> kept;
  kept.reserve(values.size());
  for (double v : values)
    if (v >= kDustThreshold) kept.push_back(v);
  std::stable_sort(kept.begin(), kept.end(), std::greater<>());

  double kept_sum = neumaier_sum(kept);
  if (kept_sum > 1.0) {
    // Within the 1e-9 allowance; renormalize so the simplex invariant holds.
    for (double& v : kept) v /= kept_sum;
    kept_sum = 1.0;
  }
  const double tail = std::max(0.0, 1.0 - kept_sum);
  return RankedMasses(std::move(kept), tail);
}

SizeComposition::SizeComposition(std::vector<int> sizes) : sizes_(std::move(sizes)) {
  if (sizes_.empty()) throw DomainError("SizeComposition: empty");
  for (int s : sizes_)
    if (s < 1) throw DomainError("SizeComposition: block sizes must be positive");
  std::sort(sizes_.begin(), sizes_.end(), std::greater<>());
  n_ = std::accumulate(sizes_.begin(), sizes_.end(), 0);
}

SizeComposition SizeComposition::grow(int i) const {
  std::vector<int> s = sizes_;
  s.at(i) += 1;
  return SizeComposition(std::move(s));
}

SizeComposition SizeComposition::with_singleton() const {
  std::vector<int> s = sizes_;
  s.push_back(1);
  return SizeComposition(std::move(s));
}

std::string SizeComposition::key() const { return fmt::format("{}", fmt::join(sizes_, ",")); }

SetPartition::SetPartition(std::vector<int> assignment) : assignment_(std::move(assignment)) {
  if (assignment_.empty()) throw DomainError("SetPartition: empty ground set");
  int next = 0;
  for (int b : assignment_) {
    if (b < 0 || b > next) throw DomainError("SetPartition: not a restricted-growth string");
    if (b == next) {
      block_sizes_.push_back(0);
      ++next;
    }
    ++block_sizes_[b];
  }
}

SetPartition SetPartition::from_labels(std::span<const int> labels) {
  std::vector<int> rgs(labels.size());
  std::vector<std::pair<int, int>> seen;  // (label, block) pairs, small k
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto it = std::find_if(seen.begin(), seen.end(), [&](auto& p) { return p.first == labels[i]; });
    if (it == seen.end()) {
      seen.emplace_back(labels[i], static_cast<int>(seen.size()));
      rgs[i] = seen.back().second;
    } else {
      rgs[i] = it->second;
    }
  }
  return SetPartition(std::move(rgs));
}

SetPartition SetPartition::parse(std::string_view text) {
  std::vector<int> labels;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find(',', pos), text.size());
    const std::string_view tok = text.substr(pos, end - pos);
    int v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size())
      throw DomainError(fmt::format("SetPartition::parse: bad token '{}'", tok));
    labels.push_back(v);
    pos = end + 1;
  }
  return SetPartition(std::move(labels));
}

SetPartition SetPartition::single_block(int n) {
  if (n < 1) throw DomainError("single_block: n must be positive");
  return SetPartition(std::vector<int>(n, 0));
}

SetPartition SetPartition::singletons(int n) {
  if (n < 1) throw DomainError("singletons: n must be positive");
  std::vector<int> a(n);
  std::iota(a.begin(), a.end(), 0);
  return SetPartition(std::move(a));
}

SizeComposition SetPartition::composition() const {
  return SizeComposition(std::vector<int>(block_sizes_.begin(), block_sizes_.end()));
}

std::vector<std::vector<int>> SetPartition::blocks() const {
  std::vector<std::vector<int>> out(block_sizes_.size());
  for (std::size_t b = 0; b < out.size(); ++b) out[b].reserve(block_sizes_[b]);
  for (int i = 0; i < n(); ++i) out[assignment_[i]].push_back(i);
  return out;
}

std::string SetPartition::key() const { return fmt::format("{}", fmt::join(assignment_, ",")); }

std::vector<SetPartition> enumerate_partitions(int n) {
  if (n < 1 || n > 12) throw DomainError(fmt::format("enumerate_partitions: n={} outside [1,12]", n));
  std::vector<SetPartition> out;
  out.reserve(bell_number(n));
  // Odometer over restricted-growth strings; prefix_max[i] = max(a[0..i]).
  std::vector<int> a(n, 0);
  std::vector<int> prefix_max(n, 0);
  while (true) {
    out.emplace_back(a);
    int i = n - 1;
    while (i > 0 && a[i] > prefix_max[i - 1]) --i;
    if (i == 0) break;
    ++a[i];
    prefix_max[i] = std::max(prefix_max[i - 1], a[i]);
    for (int j = i + 1; j < n; ++j) {
      a[j] = 0;
      prefix_max[j] = prefix_max[i];
    }
  }
  return out;
}

std::uint64_t bell_number(int n) {
  if (n < 0 || n > 25) throw DomainError("bell_number: n outside [0,25]");
  // Bell triangle.
  std::vector<std::uint64_t> row{1};
  for (int i = 0; i < n; ++i) {
    std::vector<std::uint64_t> next{row.back()};
    for (std::uint64_t v : row) next.push_back(next.back() + v);
    row = std::move(next);
  }
  return row.front();
}

std::vector<SizeComposition> enumerate_compositions(int n) {
  if (n < 1) throw DomainError("enumerate_compositions: n must be positive");
  std::vector<SizeComposition> out;
  std::vector<int> parts;
  auto rec = [&](auto& self, int remaining, int max_part) -> void {
    if (remaining == 0) {
      out.emplace_back(parts);
      return;
    }
    for (int p = std::min(remaining, max_part); p >= 1; --p) {
      parts.push_back(p);
      self(self, remaining - p, p);
      parts.pop_back();
    }
  };
  rec(rec, n, n);
  return out;
}

std::vector<int> refinement_counts(const SetPartition& fine, const SetPartition& coarse) {
  if (fine.n() != coarse.n())
    throw RefinementError(fmt::format("refinement_counts: ground sets differ ({} vs {})", fine.n(), coarse.n()));
  std::vector<int> parent(fine.num_blocks(), -1);
  std::vector<int> counts(coarse.num_blocks(), 0);
  for (int i = 0; i < fine.n(); ++i) {
    const int fb = fine.block_of(i);
    const int cb = coarse.block_of(i);
    if (parent[fb] == -1) {
      parent[fb] = cb;
      ++counts[cb];
    } else if (parent[fb] != cb) {
      throw RefinementError(
          fmt::format("refinement_counts: {} does not refine {}", fine.key(), coarse.key()));
    }
  }
  return counts;
}

bool refines(const SetPartition& fine, const SetPartition& coarse) {
  try {
    refinement_counts(fine, coarse);
    return true;
  } catch (const RefinementError&) {
    return false;
  }
}

}  // namespace coagfrag
