#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <string>

#include "csp/harness.hpp"
#include "csp/sticks.hpp"
#include "oracles.hpp"

using namespace csp;

TEST(GemSticks, TelescopingIdentity) {
  Rng rng(10);
  for (double theta : {0.2, 1.0, 5.0}) {
    for (int k : {1, 5, 50}) {
      const StickWeights s = gem_sticks(GemParams(theta), k, rng);
      ASSERT_EQ(s.weights.size(), k);
      EXPECT_NEAR(s.weights.sum() + s.tail_mass_bound, 1.0, 1e-12);
      EXPECT_TRUE((s.weights.array() >= 0.0).all());
      EXPECT_EQ(s.kind, StickKind::partition);
    }
  }
  EXPECT_THROW(gem_sticks(GemParams(1.0), 0, rng), std::domain_error);
}

TEST(GemSticks, ExpectedTailAndFirstStick) {
  Rng rng(11);
  const double theta = 2.0;
  const int k = 3, reps = 100000;
  double tail = 0.0, first = 0.0;
  for (int i = 0; i < reps; ++i) {
    const StickWeights s = gem_sticks(GemParams(theta), k, rng);
    tail += s.tail_mass_bound;
    first += s.weights[0];
  }
  // E prod (1 - V_j) = (theta / (1 + theta))^K, E V_1 = 1 / (1 + theta).
  EXPECT_NEAR(tail / reps, std::pow(theta / (1 + theta), k), 0.005);
  EXPECT_NEAR(first / reps, 1.0 / (1 + theta), 0.003);
}

TEST(GemSticks, ToTolerance) {
  Rng rng(12);
  EXPECT_EQ(gem_expected_truncation(GemParams(1.0), 0.5), 1);
  EXPECT_EQ(gem_expected_truncation(GemParams(1.0), 1e-6), 20);
  for (int i = 0; i < 50; ++i) {
    const StickWeights s = gem_sticks_to_tolerance(GemParams(3.0), 1e-8, rng);
    EXPECT_LE(s.tail_mass_bound, 1e-8);
    EXPECT_GE(s.truncation, gem_expected_truncation(GemParams(3.0), 1e-8));
  }
  EXPECT_THROW(gem_expected_truncation(GemParams(1.0), 0.0), std::domain_error);
}

TEST(Paintbox, Examples) {
  Rng rng(13);
  StickWeights single;
  single.weights = Eigen::VectorXd::Ones(1);
  EXPECT_EQ(format(paintbox_partition(single, 4, rng)), "[[1,2,3,4]]");
  EXPECT_EQ(paintbox_partition(single, 0, rng).n(), 0);

  StickWeights two;
  two.weights = Eigen::Vector2d(0.5, 0.5);
  int together = 0;
  const int reps = 100000;
  for (int i = 0; i < reps; ++i) together += paintbox_partition(two, 2, rng).num_blocks() == 1;
  EXPECT_NEAR(together / static_cast<double>(reps), 0.5, 0.006);
}

TEST(Paintbox, RefusesHeavyTail) {
  Rng rng(14);
  const StickWeights s = gem_sticks(GemParams(5.0), 3, rng);
  ASSERT_GT(s.tail_mass_bound, 1e-6);
  try {
    paintbox_partition(s, 5, rng);
    FAIL() << "expected TruncationError";
  } catch (const TruncationError& e) {
    EXPECT_DOUBLE_EQ(e.tail_mass(), s.tail_mass_bound);
    EXPECT_GT(e.required_k(), 3);
  }
  EXPECT_NO_THROW(paintbox_partition(s, 5, rng, 1.0));
  StickWeights feature;
  feature.kind = StickKind::feature;
  feature.weights = Eigen::VectorXd::Constant(1, 0.5);
  EXPECT_THROW(paintbox_partition(feature, 2, rng), std::invalid_argument);
}

TEST(Paintbox, GemLawIsCrp) {
  Rng rng(15);
  const double theta = 1.5;
  Histogram h;
  for (int i = 0; i < 100000; ++i) {
    h[format(paintbox_partition(gem_sticks_to_tolerance(GemParams(theta), 1e-9, rng), 4, rng))]++;
  }
  std::map<std::string, double> exact;
  for (const auto& blocks : oracle::partitions(4)) {
    const Partition p(4, blocks);
    exact[format(p)] = oracle::crp_chain_probability(p.blocks(), 4, theta);
  }
  EXPECT_LE(tvd(h, exact), 0.02);
}

TEST(Paintbox, InvariantToStickOrder) {
  // Permuting the sticks changes labels but not the partition law.
  Rng rng(16);
  StickWeights a;
  a.weights = Eigen::Vector3d(0.6, 0.3, 0.1);
  StickWeights b;
  b.weights = Eigen::Vector3d(0.1, 0.6, 0.3);
  Histogram ha, hb;
  for (int i = 0; i < 50000; ++i) {
    ha[format(paintbox_partition(a, 3, rng))]++;
    hb[format(paintbox_partition(b, 3, rng))]++;
  }
  EXPECT_LE(tvd(ha, hb), 0.02);
}

TEST(IbpSticks, Structure) {
  Rng rng(17);
  const IbpParams params(3.0, 2.0);
  for (int i = 0; i < 100; ++i) {
    const StickWeights s = ibp_sticks(params, 5, rng);
    EXPECT_EQ(s.kind, StickKind::feature);
    EXPECT_EQ(s.rounds, 5);
    ASSERT_EQ(static_cast<Eigen::Index>(s.first_round.size()), s.weights.size());
    for (std::size_t j = 1; j < s.first_round.size(); ++j) EXPECT_LE(s.first_round[j - 1], s.first_round[j]);
    EXPECT_TRUE((s.weights.array() > 0.0).all() && (s.weights.array() < 1.0).all());
    EXPECT_NEAR(s.tail_mass_bound, 3.0 * 2.0 / 7.0, 1e-15);
  }
  EXPECT_THROW(ibp_sticks(params, 0, rng), std::domain_error);
}

TEST(IbpSticks, FeaturizedLawIsIbp) {
  Rng rng(18);
  const IbpParams params(1.0, 1.0);
  Histogram a, b;
  for (int i = 0; i < 50000; ++i) {
    a[size_profile_key(bernoulli_featurize(ibp_sticks(params, 3, rng), 3, rng))]++;
    b[size_profile_key(ibp_sample(params, 3, rng))]++;
  }
  EXPECT_LE(tvd(a, b), 0.025);
}

TEST(BernoulliFeaturize, Examples) {
  Rng rng(19);
  StickWeights s;
  s.kind = StickKind::feature;
  s.weights = Eigen::Vector2d(1.0, 1.0);
  EXPECT_EQ(format(bernoulli_featurize(s, 3, rng)), "[[1,2,3],[1,2,3]]");
  EXPECT_EQ(bernoulli_featurize(s, 0, rng).num_blocks(), 0);

  s.weights = Eigen::Vector2d(0.5, 0.0);
  EXPECT_THROW(bernoulli_featurize(s, 2, rng), std::domain_error);
  s.weights = Eigen::Vector2d(0.5, 1.5);
  EXPECT_THROW(bernoulli_featurize(s, 2, rng), std::domain_error);
  s.weights = Eigen::Vector2d(0.5, std::nan(""));
  EXPECT_THROW(bernoulli_featurize(s, 2, rng), std::domain_error);

  StickWeights partition_kind;
  partition_kind.weights = Eigen::VectorXd::Constant(1, 0.5);
  EXPECT_THROW(bernoulli_featurize(partition_kind, 2, rng), std::invalid_argument);
}

TEST(BernoulliFeaturize, MembershipRate) {
  Rng rng(20);
  StickWeights s;
  s.kind = StickKind::feature;
  s.weights = Eigen::Vector3d(0.2, 0.5, 0.9);
  const int reps = 20000, n = 5;
  double members = 0.0;
  for (int i = 0; i < reps; ++i) {
    for (const Block& b : bernoulli_featurize(s, n, rng).blocks()) members += b.size();
  }
  EXPECT_NEAR(members / reps, n * 1.6, 0.05);
}

TEST(BernoulliFeaturize, RoundTags) {
  Rng rng(21);
  StickWeights s;
  s.kind = StickKind::feature;
  s.rounds = 4;
  s.weights = Eigen::Vector2d(1e-12, 1.0);
  s.first_round = {3, 2};
  // Index 3 owns the first stick; indices 1 and 2 never join it. The second
  // stick starts at index 2 and then always includes later indices.
  for (int i = 0; i < 20; ++i) EXPECT_EQ(format(bernoulli_featurize(s, 4, rng)), "[[2,3,4],[3]]");
  EXPECT_EQ(format(bernoulli_featurize(s, 1, rng)), "[]");
  EXPECT_THROW(bernoulli_featurize(s, 5, rng), std::domain_error);
  s.first_round = {1};
  EXPECT_THROW(bernoulli_featurize(s, 2, rng), std::invalid_argument);
}
