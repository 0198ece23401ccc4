#pragma once

// Ranked mass sequences and set partitions of {1..n}.

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace coagfrag {

/// A truncated element of the ranked simplex: decreasing masses plus the
/// total mass of everything not individually represented.
class RankedMasses {
public:
  /// The degenerate sequence (1).
  RankedMasses() : masses_{1.0}, tail_(0.0) {}

  /// Validates an already ranked sequence. Throws DomainError when the
  /// masses are not decreasing, negative, or do not sum with tail to 1.
  RankedMasses(std::vector<double> masses, double tail);

  std::span<const double> masses() const noexcept { return masses_; }
  double tail() const noexcept { return tail_; }
  std::size_t size() const noexcept { return masses_.size(); }
  double operator[](std::size_t i) const { return masses_[i]; }

  /// sum(masses) + tail.
  double total() const noexcept;

private:
  std::vector<double> masses_;
  double tail_;
};

/// Masses below this are folded into the tail by rank().
inline constexpr double kDustThreshold = 1e-15;

/// Decreasing rearrangement. Ties keep input order; the tail is
/// 1 - sum(values), clamped at zero, plus any folded dust.
RankedMasses rank(std::span<const double> values);

/// Block sizes of a partition as a decreasing multiset: the argument of an
/// EPPF.
class SizeComposition {
public:
  explicit SizeComposition(std::vector<int> sizes);

  std::span<const int> sizes() const noexcept { return sizes_; }
  int n() const noexcept { return n_; }
  int k() const noexcept { return static_cast<int>(sizes_.size()); }
  int max_size() const noexcept { return sizes_.front(); }

  /// Composition with block i grown by one (i indexes sizes()).
  SizeComposition grow(int i) const;
  /// Composition with an extra singleton block.
  SizeComposition with_singleton() const;

  std::string key() const;

  auto operator<=>(const SizeComposition& other) const { return sizes_ <=> other.sizes_; }
  bool operator==(const SizeComposition& other) const = default;

private:
  std::vector<int> sizes_;
  int n_ = 0;
};

/// Partition of {1..n} stored as a restricted-growth string: element i is in
/// block assignment[i], blocks numbered by first appearance.
class SetPartition {
public:
  /// Requires a valid restricted-growth string; throws DomainError otherwise.
  explicit SetPartition(std::vector<int> assignment);

  /// Canonicalizes arbitrary block labels by order of first appearance.
  static SetPartition from_labels(std::span<const int> labels);
  /// Parses the canonical text form "0,0,1".
  static SetPartition parse(std::string_view text);
  static SetPartition single_block(int n);
  static SetPartition singletons(int n);

  int n() const noexcept { return static_cast<int>(assignment_.size()); }
  int num_blocks() const noexcept { return static_cast<int>(block_sizes_.size()); }
  std::span<const int> assignment() const noexcept { return assignment_; }
  int block_of(int element) const { return assignment_[element]; }
  std::span<const int> block_sizes() const noexcept { return block_sizes_; }
  SizeComposition composition() const;

  /// Blocks as 0-based element lists, in block order.
  std::vector<std::vector<int>> blocks() const;

  /// Canonical text form, e.g. "0,0,1" for {{1,2},{3}}.
  std::string key() const;

  auto operator<=>(const SetPartition& other) const { return assignment_ <=> other.assignment_; }
  bool operator==(const SetPartition& other) const { return assignment_ == other.assignment_; }

private:
  std::vector<int> assignment_;
  std::vector<int> block_sizes_;
};

/// All set partitions of {1..n} in canonical form, lexicographic RGS order.
/// Requires 1 <= n <= 12.
std::vector<SetPartition> enumerate_partitions(int n);

/// Bell number B(n) for 0 <= n <= 25.
std::uint64_t bell_number(int n);

/// Integer partitions of n as decreasing compositions.
std::vector<SizeComposition> enumerate_compositions(int n);

/// j_i = number of fine blocks contained in coarse block i. Throws
/// RefinementError if fine does not refine coarse.
std::vector<int> refinement_counts(const SetPartition& fine, const SetPartition& coarse);

/// True when every block of fine lies inside a block of coarse.
bool refines(const SetPartition& fine, const SetPartition& coarse);

}  // namespace coagfrag
