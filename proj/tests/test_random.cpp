#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "csp/random.hpp"

using csp::Rng;

TEST(Philox, KnownAnswers) {
  using A4 = std::array<std::uint32_t, 4>;
  using A2 = std::array<std::uint32_t, 2>;
  EXPECT_EQ(Rng::philox(A4{0, 0, 0, 0}, A2{0, 0}), (A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(Rng::philox(A4{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, A2{0xffffffff, 0xffffffff}),
            (A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(Rng::philox(A4{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, A2{0xa4093822, 0x299f31d0}),
            (A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(Rng, StreamLayout) {
  // First draw of (seed 0, stream 0) packs the first two words of block 0.
  Rng rng(0, 0);
  EXPECT_EQ(rng(), (std::uint64_t{0xe169c58d} << 32) | 0x6627e8d5);
  EXPECT_EQ(rng(), (std::uint64_t{0x9b00dbd8} << 32) | 0xbc57ac4c);
}

TEST(Rng, SameSeedSameSequence) {
  Rng a(42, 7), b(42, 7), c(42, 8), d(43, 7);
  bool differs_stream = false, differs_seed = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a();
    EXPECT_EQ(x, b());
    differs_stream |= x != c();
    differs_seed |= x != d();
  }
  EXPECT_TRUE(differs_stream);
  EXPECT_TRUE(differs_seed);
  Rng e = a.split(9);
  EXPECT_EQ(e.seed(), 42u);
  EXPECT_EQ(e.stream(), 9u);
}

namespace {

struct Moments {
  double mean = 0.0;
  double var = 0.0;
};

template <class F>
Moments moments(F draw, int reps) {
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < reps; ++i) {
    const double x = draw();
    s += x;
    s2 += x * x;
  }
  Moments m;
  m.mean = s / reps;
  m.var = s2 / reps - m.mean * m.mean;
  return m;
}

}  // namespace

TEST(Variates, UniformRange) {
  Rng rng(1);
  for (int i = 0; i < 10000; ++i) {
    const double u = csp::uniform(rng);
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    const double v = csp::uniform_open(rng);
    ASSERT_GT(v, 0.0);
    ASSERT_LT(v, 1.0);
  }
}

TEST(Variates, Moments) {
  Rng rng(2);
  const int reps = 200000;
  const auto se = [&](double var) { return 5.0 * std::sqrt(var / reps); };

  auto m = moments([&] { return csp::exponential(rng); }, reps);
  EXPECT_NEAR(m.mean, 1.0, se(1.0));

  m = moments([&] { return csp::normal(rng); }, reps);
  EXPECT_NEAR(m.mean, 0.0, se(1.0));
  EXPECT_NEAR(m.var, 1.0, 0.02);

  for (double shape : {0.3, 1.0, 2.5, 30.0}) {
    m = moments([&] { return csp::gamma_variate(shape, rng); }, reps);
    EXPECT_NEAR(m.mean, shape, se(shape)) << shape;
    EXPECT_NEAR(m.var, shape, 0.05 * shape) << shape;
  }

  for (auto [a, b] : {std::pair{1.0, 2.0}, std::pair{2.0, 3.0}, std::pair{0.5, 0.5}}) {
    const double mean = a / (a + b);
    const double var = a * b / ((a + b) * (a + b) * (a + b + 1.0));
    m = moments([&] { return csp::beta_variate(a, b, rng); }, reps);
    EXPECT_NEAR(m.mean, mean, se(var));
    EXPECT_NEAR(m.var, var, 0.03 * var);
  }

  for (double mean : {0.2, 3.0, 9.9, 10.0, 57.0}) {
    m = moments([&] { return static_cast<double>(csp::poisson_variate(mean, rng)); }, reps);
    EXPECT_NEAR(m.mean, mean, se(mean)) << mean;
    EXPECT_NEAR(m.var, mean, 0.03 * mean) << mean;
  }
}

TEST(Variates, PoissonPmfLargeMean) {
  // The PTRS branch against exact probabilities near the mode.
  Rng rng(3);
  const double mean = 25.0;
  const int reps = 200000;
  std::vector<int> counts(100, 0);
  for (int i = 0; i < reps; ++i) {
    const int k = csp::poisson_variate(mean, rng);
    if (k < 100) ++counts[k];
  }
  for (int k = 18; k <= 32; ++k) {
    const double p = std::exp(k * std::log(mean) - mean - std::lgamma(k + 1.0));
    EXPECT_NEAR(counts[k] / static_cast<double>(reps), p, 5.0 * std::sqrt(p / reps)) << k;
  }
}

TEST(Variates, PoissonZeroMean) {
  Rng rng(4);
  EXPECT_EQ(csp::poisson_variate(0.0, rng), 0);
}

TEST(Variates, Categorical) {
  Rng rng(5);
  Eigen::VectorXd w(3);
  w << 1.0, 0.0, 3.0;
  std::vector<int> counts(3, 0);
  const int reps = 100000;
  for (int i = 0; i < reps; ++i) ++counts[csp::categorical(w, rng)];
  EXPECT_EQ(counts[1], 0);
  EXPECT_NEAR(counts[0] / static_cast<double>(reps), 0.25, 0.01);
}

TEST(Variates, RejectsBadParameters) {
  Rng rng(6);
  EXPECT_THROW(csp::gamma_variate(0.0, rng), std::domain_error);
  EXPECT_THROW(csp::beta_variate(-1.0, 1.0, rng), std::domain_error);
  EXPECT_THROW(csp::poisson_variate(-1.0, rng), std::domain_error);
}
