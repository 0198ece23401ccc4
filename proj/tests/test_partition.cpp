#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>
#include <vector>

#include "coagfrag/errors.hpp"
#include "coagfrag/partition.hpp"

using namespace coagfrag;

namespace {

// Every map {0..n-1} -> {0..n-1}, canonicalized by first appearance; the
// distinct results are the set partitions of [n].
std::set<std::vector<int>> brute_force_partitions(int n) {
  std::set<std::vector<int>> out;
  std::vector<int> labels(n, 0);
  while (true) {
    std::vector<int> relabel(n, -1), rgs(n);
    int next = 0;
    for (int i = 0; i < n; ++i) {
      if (relabel[labels[i]] < 0) relabel[labels[i]] = next++;
      rgs[i] = relabel[labels[i]];
    }
    out.insert(rgs);
    int i = 0;
    while (i < n && ++labels[i] == n) labels[i++] = 0;
    if (i == n) break;
  }
  return out;
}

}  // namespace

TEST_CASE("rank sorts and records the tail") {
  const std::vector<double> a{0.2, 0.5, 0.3};
  const RankedMasses r = rank(a);
  REQUIRE(r.size() == 3);
  CHECK(r[0] == 0.5);
  CHECK(r[1] == 0.3);
  CHECK(r[2] == 0.2);
  CHECK(r.tail() == doctest::Approx(0.0).epsilon(1e-15));

  const std::vector<double> one{1.0};
  CHECK(rank(one).size() == 1);
  CHECK(rank(one).tail() == 0.0);

  const std::vector<double> b{0.4, 0.4};
  const RankedMasses rb = rank(b);
  CHECK(rb.size() == 2);
  CHECK(rb.tail() == doctest::Approx(0.2).epsilon(1e-14));
}

TEST_CASE("rank rejects bad input and folds dust") {
  const std::vector<double> neg{0.5, -0.1};
  CHECK_THROWS_AS(rank(neg), DomainError);
  const std::vector<double> big{0.7, 0.4};
  CHECK_THROWS_AS(rank(big), DomainError);
  const std::vector<double> dust{0.5, 1e-17, 0.5};
  const RankedMasses r = rank(dust);
  CHECK(r.size() == 2);
  CHECK(r.total() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("rank is idempotent and permutation invariant") {
  std::vector<double> v{0.05, 0.3, 0.1, 0.25, 0.1, 0.15};
  const RankedMasses r = rank(v);
  const RankedMasses rr = rank(r.masses());
  CHECK(std::equal(r.masses().begin(), r.masses().end(), rr.masses().begin(), rr.masses().end()));
  CHECK(rr.tail() == doctest::Approx(r.tail()));
  std::sort(v.begin(), v.end());
  do {
    const RankedMasses p = rank(v);
    CHECK(std::equal(r.masses().begin(), r.masses().end(), p.masses().begin(), p.masses().end()));
  } while (std::next_permutation(v.begin(), v.end()));
  for (std::size_t i = 1; i < r.size(); ++i) CHECK(r[i - 1] >= r[i]);
  CHECK(r.total() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("RankedMasses constructor validates") {
  CHECK_THROWS_AS(RankedMasses({0.3, 0.5}, 0.2), DomainError);
  CHECK_THROWS_AS(RankedMasses({0.5, 0.3}, 0.1), DomainError);
  CHECK_THROWS_AS(RankedMasses({0.5, 0.5}, -0.0001), DomainError);
  CHECK_NOTHROW(RankedMasses({0.5, 0.3}, 0.2));
}

TEST_CASE("enumerate_partitions matches brute force and Bell numbers") {
  CHECK(enumerate_partitions(1).size() == 1);
  CHECK(enumerate_partitions(3).size() == 5);
  CHECK(enumerate_partitions(4).size() == 15);
  const std::uint64_t bell[] = {1, 1, 2, 5, 15, 52, 203, 877, 4140, 21147, 115975, 678570, 4213597};
  for (int n = 0; n <= 12; ++n) CHECK(bell_number(n) == bell[n]);
  for (int n = 1; n <= 6; ++n) {
    const auto parts = enumerate_partitions(n);
    std::set<std::vector<int>> got;
    for (const auto& p : parts) got.insert(std::vector<int>(p.assignment().begin(), p.assignment().end()));
    CHECK(got.size() == parts.size());
    CHECK(got == brute_force_partitions(n));
    CHECK(parts.size() == bell_number(n));
    CHECK(std::is_sorted(parts.begin(), parts.end()));
  }
  CHECK_THROWS_AS(enumerate_partitions(0), DomainError);
  CHECK_THROWS_AS(enumerate_partitions(13), DomainError);
}

TEST_CASE("restricted-growth form") {
  const SetPartition p({0, 0, 1});
  CHECK(p.key() == "0,0,1");
  CHECK(p.num_blocks() == 2);
  CHECK(p.block_sizes()[0] == 2);
  CHECK(SetPartition::parse("0,1,0,2").key() == "0,1,0,2");
  CHECK_THROWS_AS(SetPartition({1, 0}), DomainError);
  CHECK_THROWS_AS(SetPartition({0, 2}), DomainError);
  CHECK_THROWS_AS(SetPartition::parse("0,x"), DomainError);
  const std::vector<int> labels{7, 3, 7, 9};
  CHECK(SetPartition::from_labels(labels).key() == "0,1,0,2");
  for (int n = 1; n <= 6; ++n)
    for (const auto& q : enumerate_partitions(n)) {
      const auto sizes = q.block_sizes();
      CHECK(std::accumulate(sizes.begin(), sizes.end(), 0) == n);
      CHECK(SetPartition::parse(q.key()) == q);
    }
}

TEST_CASE("enumerate_compositions counts integer partitions") {
  const std::size_t counts[] = {1, 2, 3, 5, 7, 11, 15, 22};
  for (int n = 1; n <= 8; ++n) {
    const auto comps = enumerate_compositions(n);
    CHECK(comps.size() == counts[n - 1]);
    std::set<std::vector<int>> from_partitions;
    for (const auto& p : enumerate_partitions(n)) {
      const auto c = p.composition();
      from_partitions.insert(std::vector<int>(c.sizes().begin(), c.sizes().end()));
    }
    CHECK(from_partitions.size() == comps.size());
  }
}

TEST_CASE("SizeComposition grow and singleton") {
  const SizeComposition s({2, 1});
  CHECK(s.n() == 3);
  CHECK(s.k() == 2);
  CHECK(s.grow(1).key() == SizeComposition({2, 2}).key());
  CHECK(s.grow(0).key() == SizeComposition({3, 1}).key());
  CHECK(s.with_singleton().key() == SizeComposition({2, 1, 1}).key());
  CHECK_THROWS_AS(SizeComposition({}), DomainError);
  CHECK_THROWS_AS(SizeComposition({1, 0}), DomainError);
}

TEST_CASE("refinement_counts") {
  const auto fine = SetPartition::singletons(3);
  const SetPartition coarse({0, 0, 1});
  CHECK(refinement_counts(fine, coarse) == std::vector<int>{2, 1});
  CHECK(refinement_counts(coarse, coarse) == std::vector<int>{1, 1});
  CHECK(refinement_counts(SetPartition::singletons(4), SetPartition::single_block(4)) == std::vector<int>{4});
  CHECK_THROWS_AS(refinement_counts(SetPartition({0, 1, 1}), coarse), RefinementError);
  CHECK_FALSE(refines(SetPartition({0, 1, 1}), coarse));

  const auto parts = enumerate_partitions(5);
  for (const auto& c : parts)
    for (const auto& f : parts) {
      bool brute = true;
      for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j)
          if (f.block_of(i) == f.block_of(j) && c.block_of(i) != c.block_of(j)) brute = false;
      CHECK(refines(f, c) == brute);
      if (brute) {
        const auto js = refinement_counts(f, c);
        CHECK(std::accumulate(js.begin(), js.end(), 0) == f.num_blocks());
        CHECK(static_cast<int>(js.size()) == c.num_blocks());
      }
    }
}
