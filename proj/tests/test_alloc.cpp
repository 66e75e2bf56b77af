#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "csp/alloc.hpp"
#include "csp/enumerate.hpp"
#include "csp/random.hpp"
#include "oracles.hpp"

using namespace csp;

TEST(Partition, CanonicalizesBlockAndMemberOrder) {
  const Partition p(6, {{6, 5}, {4, 1, 3}, {2}});
  EXPECT_EQ(format(p), "[[1,3,4],[2],[5,6]]");
  EXPECT_EQ(p.block_sizes(), (std::vector<int>{3, 1, 2}));
  EXPECT_EQ(p.appearance_labels(), (std::vector<int>{1, 2, 1, 1, 3, 3}));
  EXPECT_EQ(p, Partition(6, {{2}, {5, 6}, {1, 3, 4}}));
}

TEST(Partition, RejectsNonPartitions) {
  EXPECT_THROW(Partition(3, {{1, 2}}), std::invalid_argument);            // misses 3
  EXPECT_THROW(Partition(3, {{1, 2}, {2, 3}}), std::invalid_argument);    // overlap
  EXPECT_THROW(Partition(3, {{1, 2, 3}, {}}), std::invalid_argument);     // empty block
  EXPECT_THROW(Partition(2, {{1, 2, 3}}), std::invalid_argument);         // out of range
  EXPECT_THROW(Partition(2, {{0, 1, 2}}), std::invalid_argument);
}

TEST(Partition, EmptySet) {
  const Partition p(0, {});
  EXPECT_EQ(p.num_blocks(), 0);
  EXPECT_EQ(format(p), "[]");
}

TEST(FeatureAllocation, MultiplicitiesAndOrder) {
  const FeatureAllocation f(5, {{2, 5}, {3, 2}, {2, 3}, {1}});
  EXPECT_EQ(f.num_blocks(), 4);
  EXPECT_EQ(f.num_unique(), 3);
  EXPECT_EQ(format(f), "[[2,3],[2,3],[2,5],[1]]");
  EXPECT_EQ(f.block_sizes(), (std::vector<int>{2, 2, 2, 1}));
  const Multiplicities m = multiplicities(f);
  EXPECT_EQ(m.unique, 3);
  EXPECT_EQ(m.rho, (std::vector<int>{2, 1, 1}));
}

TEST(FeatureAllocation, EmptyIsLegal) {
  const FeatureAllocation f(3, {});
  EXPECT_EQ(f.num_blocks(), 0);
  EXPECT_EQ(format(f), "[]");
  EXPECT_EQ(membership_matrix(f).cols(), 0);
}

TEST(FeatureAllocation, Rejects) {
  EXPECT_THROW(FeatureAllocation(3, {{}}), std::invalid_argument);
  EXPECT_THROW(FeatureAllocation(3, {{1, 1}}), std::invalid_argument);
  EXPECT_THROW(FeatureAllocation(3, {{4}}), std::invalid_argument);
}

TEST(OrderedFeatureAllocation, ValidatesPermutation) {
  const FeatureAllocation f(3, {{1, 2}, {3}});
  const OrderedFeatureAllocation o(f, {1, 0});
  EXPECT_EQ(o.ordered_blocks(), (std::vector<Block>{{3}, {1, 2}}));
  EXPECT_THROW(OrderedFeatureAllocation(f, {0, 0}), std::invalid_argument);
  EXPECT_THROW(OrderedFeatureAllocation(f, {0}), std::invalid_argument);
}

TEST(Restrict, PartitionAndFeatures) {
  const Partition p(5, {{1, 4}, {2, 5}, {3}});
  EXPECT_EQ(format(restrict(p, 3)), "[[1],[2],[3]]");
  EXPECT_EQ(format(restrict(p, 4)), "[[1,4],[2],[3]]");
  EXPECT_EQ(restrict(p, 0).num_blocks(), 0);
  EXPECT_THROW(restrict(p, 6), std::domain_error);

  const FeatureAllocation f(4, {{3, 4}, {1, 4}, {4}});
  EXPECT_EQ(format(restrict(f, 3)), "[[1],[3]]");
  EXPECT_THROW(restrict(f, -1), std::domain_error);
}

TEST(Consistency, Sequences) {
  const std::vector<Partition> good = {Partition(1, {{1}}), Partition(2, {{1}, {2}}), Partition(3, {{1, 3}, {2}})};
  EXPECT_TRUE(check_consistency(std::span<const Partition>(good)));
  const std::vector<Partition> bad = {Partition(1, {{1}}), Partition(2, {{1, 2}}), Partition(3, {{1, 3}, {2}})};
  EXPECT_FALSE(check_consistency(std::span<const Partition>(bad)));

  const std::vector<RawPartition> raw = {{1, {{1}}}, {2, {{1}, {1, 2}}}};
  EXPECT_FALSE(check_consistency(std::span<const RawPartition>(raw)));
  EXPECT_FALSE(is_partition_of(2, {{1}, {1, 2}}));
  const std::vector<RawPartition> raw_ok = {{1, {{1}}}, {2, {{2}, {1}}}};
  EXPECT_TRUE(check_consistency(std::span<const RawPartition>(raw_ok)));
}

TEST(Induced, PartitionFromLabels) {
  const std::vector<std::string> labels = {"b", "a", "b", "c", "a"};
  EXPECT_EQ(format(induced_partition(labels)), "[[1,3],[2,5],[4]]");
}

TEST(Induced, FeaturesFromLabelSets) {
  const std::vector<std::vector<int>> sets = {{7, 9}, {}, {9}, {7, 9, 11}};
  const FeatureAllocation f = induced_feature_allocation(sets);
  EXPECT_EQ(f.n(), 4);
  EXPECT_EQ(format(f), "[[1,3,4],[1,4],[4]]");
}

TEST(Membership, RoundTrip) {
  const FeatureAllocation f(4, {{1, 2}, {1, 2}, {4}});
  const Eigen::MatrixXi z = membership_matrix(f);
  EXPECT_EQ(z.rows(), 4);
  EXPECT_EQ(z.cols(), 3);
  EXPECT_EQ(z.col(0).sum(), 2);
  EXPECT_EQ(from_membership_matrix(z), f);
}

TEST(TextRecord, ParseAndRoundTrip) {
  EXPECT_EQ(parse_partition(" [ [5,6], [2],[1,4,3]] "), Partition(6, {{1, 3, 4}, {2}, {5, 6}}));
  EXPECT_THROW(parse_partition("[[1],[3]]"), std::invalid_argument);
  EXPECT_THROW(parse_partition("[[1],"), std::invalid_argument);
  EXPECT_THROW(parse_partition("{\"a\":1}"), std::invalid_argument);
  const FeatureAllocation f = parse_feature_allocation("[[2],[2]]", 4);
  EXPECT_EQ(f.n(), 4);
  EXPECT_EQ(f.num_blocks(), 2);
  EXPECT_EQ(parse_feature_allocation("[[2],[3]]").n(), 3);
}

TEST(Enumerate, CountsMatchBellNumbers) {
  for (int n = 0; n <= 9; ++n) {
    const auto all = enumerate_partitions(n);
    EXPECT_EQ(static_cast<std::int64_t>(all.size()), oracle::bell(n)) << n;
    std::set<std::string> keys;
    for (const Partition& p : all) keys.insert(format(p));
    EXPECT_EQ(keys.size(), all.size()) << "duplicates at n=" << n;
  }
  EXPECT_EQ(enumerate_partitions(1).size(), 1u);
  EXPECT_EQ(enumerate_partitions(3).size(), 5u);
  EXPECT_EQ(enumerate_partitions(5).size(), 52u);
  EXPECT_THROW(enumerate_partitions(kMaxEnumerationSize + 1), std::domain_error);
}

TEST(Enumerate, MatchesIndependentEnumeration) {
  for (int n = 1; n <= 6; ++n) {
    std::set<std::string> ours, theirs;
    for (const Partition& p : enumerate_partitions(n)) ours.insert(format(p));
    for (const auto& blocks : oracle::partitions(n)) theirs.insert(format(Partition(n, blocks)));
    EXPECT_EQ(ours, theirs);
  }
}

// Property tests over random label sequences.

namespace {

std::vector<int> random_labels(Rng& rng, int n, int alphabet) {
  std::vector<int> labels(n);
  for (int& l : labels) l = static_cast<int>(uniform(rng) * alphabet);
  return labels;
}

std::vector<std::vector<int>> random_label_sets(Rng& rng, int n, int alphabet) {
  std::vector<std::vector<int>> sets(n);
  for (auto& s : sets) {
    for (int l = 0; l < alphabet; ++l) {
      if (uniform(rng) < 0.3) s.push_back(l);
    }
  }
  return sets;
}

}  // namespace

TEST(Property, InducedPrefixesAreConsistent) {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(uniform(rng) * 9);
    const auto labels = random_labels(rng, n, 4);
    std::vector<Partition> prefixes;
    for (int m = 1; m <= n; ++m) {
      prefixes.push_back(induced_partition(std::vector<int>(labels.begin(), labels.begin() + m)));
    }
    ASSERT_TRUE(check_consistency(std::span<const Partition>(prefixes)));
    for (int m = 1; m <= n; ++m) ASSERT_EQ(restrict(prefixes.back(), m), prefixes[m - 1]);

    const auto sets = random_label_sets(rng, n, 5);
    std::vector<FeatureAllocation> fprefixes;
    for (int m = 1; m <= n; ++m) {
      fprefixes.push_back(induced_feature_allocation(std::vector<std::vector<int>>(sets.begin(), sets.begin() + m)));
    }
    ASSERT_TRUE(check_consistency(std::span<const FeatureAllocation>(fprefixes)));
  }
}

TEST(Property, RelabelingInvariance) {
  Rng rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(uniform(rng) * 9);
    const auto labels = random_labels(rng, n, 5);
    std::vector<int> relabeled;
    for (int l : labels) relabeled.push_back(100 - 7 * l);  // an injection
    ASSERT_EQ(induced_partition(labels), induced_partition(relabeled));
  }
}

TEST(Property, FormatParseRoundTrip) {
  Rng rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(uniform(rng) * 9);
    const Partition p = induced_partition(random_labels(rng, n, 4));
    ASSERT_EQ(parse_partition(format(p)), p);
    const FeatureAllocation f = induced_feature_allocation(random_label_sets(rng, n, 4));
    ASSERT_EQ(parse_feature_allocation(format(f), n), f);
    // Canonicalization is idempotent and insensitive to block order.
    std::vector<Block> blocks = f.blocks();
    std::reverse(blocks.begin(), blocks.end());
    ASSERT_EQ(FeatureAllocation(n, blocks), f);
  }
}
