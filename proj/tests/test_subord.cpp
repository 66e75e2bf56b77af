#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include <boost/math/special_functions/expint.hpp>

#include "csp/subord.hpp"
#include "oracles.hpp"

using namespace csp;

namespace {

// Ein(z) = sum_{k>=1} (-1)^{k+1} z^k / (k k!), fine for moderate z.
double ein_series(double z) {
  double term = 1.0, total = 0.0;
  for (int k = 1; k < 200; ++k) {
    term *= z / k;
    total += (k % 2 ? 1.0 : -1.0) * term / k;
  }
  return total;
}

// Beta process Laplace exponent for theta = 1 and theta = 2, by hand:
// theta = 1 gives gamma Ein(lambda); theta = 2 subtracts the (1 - e^{-lambda w})
// integral over (0,1).
double beta_phi_oracle(double gamma, double theta, double lambda) {
  if (theta == 1.0) return gamma * ein_series(lambda);
  return gamma * theta * (ein_series(lambda) - (1.0 - (1.0 - std::exp(-lambda)) / lambda));
}

}  // namespace

TEST(LevySpec, Validation) {
  EXPECT_THROW(LevySpec::gamma(0.0, 1.0), std::domain_error);
  EXPECT_THROW(LevySpec::gamma(1.0, -1.0), std::domain_error);
  EXPECT_THROW(LevySpec::beta(1.0, std::nan("")), std::domain_error);
  EXPECT_THROW(LevySpec::gamma(1.0, 1.0, -0.5), std::domain_error);
  EXPECT_TRUE(LevySpec::gamma(1.0, 1.0).is_gamma());
  EXPECT_FALSE(LevySpec::beta(1.0, 1.0).is_gamma());
}

TEST(Laplace, GammaClosedFormMatchesQuadrature) {
  for (double beta : {0.5, 1.0, 4.0}) {
    const LevySpec spec = LevySpec::gamma(1.7, beta);
    for (double lambda : {0.0, 0.01, 1.0, 30.0, 1e4}) {
      const double closed = laplace_exponent(spec, lambda);
      EXPECT_NEAR(closed, 1.7 * std::log1p(lambda / beta), 1e-13 * std::max(1.0, closed));
      const QuadratureValue q = laplace_exponent_quadrature(spec, lambda);
      EXPECT_NEAR(q.value, closed, 1e-9 * std::max(1.0, closed)) << beta << " " << lambda;
      for (int order = 1; order <= 4; ++order) {
        const double d = laplace_exponent_derivative(spec, order, lambda);
        const QuadratureValue dq = laplace_exponent_derivative_quadrature(spec, order, lambda);
        EXPECT_NEAR(dq.value, d, 1e-9 * std::fabs(d)) << order;
      }
    }
  }
  EXPECT_THROW(laplace_exponent(LevySpec::gamma(1, 1), -1.0), std::domain_error);
  EXPECT_THROW(laplace_exponent_derivative(LevySpec::gamma(1, 1), 0, 1.0), std::domain_error);
}

TEST(Laplace, DriftAddsLinearTerm) {
  const LevySpec spec = LevySpec::gamma(1.0, 1.0, 0.3);
  EXPECT_NEAR(laplace_exponent(spec, 2.0), 0.6 + std::log(3.0), 1e-13);
  EXPECT_NEAR(laplace_exponent_derivative(spec, 1, 2.0), 0.3 + 1.0 / 3.0, 1e-13);
}

TEST(Laplace, BetaFamilyAgainstHandIntegrals) {
  for (double theta : {1.0, 2.0}) {
    const LevySpec spec = LevySpec::beta(0.8, theta);
    for (double lambda : {0.1, 1.0, 5.0, 20.0}) {
      const double expected = beta_phi_oracle(0.8, theta, lambda);
      EXPECT_NEAR(laplace_exponent(spec, lambda), expected, 1e-9 * expected) << theta << " " << lambda;
      EXPECT_NEAR(laplace_exponent_quadrature(spec, lambda).value, expected, 1e-8 * expected);
    }
  }
  // Derivatives against quadrature for a non-integer theta.
  const LevySpec spec = LevySpec::beta(1.2, 0.6);
  for (double lambda : {0.5, 3.0, 80.0}) {
    for (int order = 1; order <= 3; ++order) {
      const double d = laplace_exponent_derivative(spec, order, lambda);
      const double dq = laplace_exponent_derivative_quadrature(spec, order, lambda).value;
      EXPECT_NEAR(d, dq, 1e-8 * std::fabs(dq)) << lambda << " " << order;
    }
  }
}

TEST(EppfFromLaplace, GammaMatchesCrp) {
  for (double theta : {0.5, 1.0, 3.0}) {
    for (double beta : {0.3, 1.0, 10.0}) {
      const LevySpec spec = LevySpec::gamma(theta, beta);
      for (int n = 1; n <= 5; ++n) {
        for (const auto& blocks : oracle::partitions(n)) {
          const Partition p(n, blocks);
          const std::vector<int> sizes = p.block_sizes();
          const EppfQuadrature q = eppf_from_laplace(spec, sizes);
          EXPECT_NEAR(q.value.log_prob, eppf_crp(CrpParams(theta), sizes).log_prob, 1e-9);
          EXPECT_LT(q.error_bound, 1e-6);
        }
      }
    }
  }
}

TEST(EppfFromLaplace, BetaFamilyIsAnEppf) {
  const LevySpec spec = LevySpec::beta(1.0, 2.0);
  for (int n = 1; n <= 4; ++n) {
    double total = 0.0;
    for (const auto& blocks : oracle::partitions(n)) {
      total += eppf_from_laplace(spec, Partition(n, blocks).block_sizes()).value.prob();
    }
    EXPECT_NEAR(total, 1.0, 1e-7) << n;
  }
  // Additivity at one point.
  const std::vector<int> base = {2, 1};
  const double p = eppf_from_laplace(spec, base).value.prob();
  const double extended = eppf_from_laplace(spec, std::vector<int>{3, 1}).value.prob() +
                          eppf_from_laplace(spec, std::vector<int>{2, 2}).value.prob() +
                          eppf_from_laplace(spec, std::vector<int>{2, 1, 1}).value.prob();
  EXPECT_NEAR(extended, p, 1e-8);
  // Not the CRP law.
  EXPECT_GT(std::fabs(eppf_from_laplace(spec, std::vector<int>{2}).value.prob() - 0.5), 1e-3);
}

TEST(EppfFromLaplace, Errors) {
  EXPECT_THROW(eppf_from_laplace(LevySpec::gamma(1, 1, 0.1), std::vector<int>{1}), std::domain_error);
  EXPECT_THROW(eppf_from_laplace(LevySpec::gamma(1, 1), std::vector<int>{}), std::domain_error);
  EXPECT_THROW(eppf_from_laplace(LevySpec::gamma(1, 1), std::vector<int>{0}), std::domain_error);
}

TEST(LevyTail, ClosedForms) {
  const LevySpec g = LevySpec::gamma(2.0, 3.0);
  for (double x : {1e-6, 0.01, 1.0, 5.0}) {
    EXPECT_NEAR(levy_tail(g, x), 2.0 * boost::math::expint(1, 3.0 * x), 1e-12 * levy_tail(g, x));
    EXPECT_NEAR(levy_mean_below(g, x), 2.0 / 3.0 * -std::expm1(-3.0 * x), 1e-12);
  }
  EXPECT_NEAR(levy_mean_total(g), 2.0 / 3.0, 1e-14);
  EXPECT_NEAR(levy_density(g, 0.5), 2.0 / 0.5 * std::exp(-1.5), 1e-14);

  const LevySpec b = LevySpec::beta(1.5, 1.0);
  for (double x : {1e-8, 0.1, 0.7}) {
    EXPECT_NEAR(levy_tail(b, x), -1.5 * std::log(x), 1e-10);
    EXPECT_NEAR(levy_mean_below(b, x), 1.5 * x, 1e-10);
  }
  EXPECT_EQ(levy_tail(b, 1.0), 0.0);
  EXPECT_NEAR(levy_mean_total(LevySpec::beta(1.5, 3.0)), 1.5, 1e-10);
  EXPECT_EQ(levy_density(b, 1.5), 0.0);
}

TEST(LevyTail, InverseRoundTrip) {
  for (const LevySpec& spec : {LevySpec::gamma(1.0, 1.0), LevySpec::gamma(5.0, 0.1), LevySpec::beta(2.0, 0.5),
                               LevySpec::beta(1.0, 3.0)}) {
    for (double y : {1e-3, 0.5, 3.0, 40.0, 300.0}) {
      const double x = levy_tail_inverse(spec, y);
      EXPECT_NEAR(levy_tail(spec, x), y, 1e-10 * y) << y;
    }
  }
  EXPECT_THROW(levy_tail_inverse(LevySpec::gamma(1, 1), 0.0), std::domain_error);
  EXPECT_THROW(levy_tail_inverse(LevySpec::gamma(1, 1), 1000.0), std::range_error);
}

TEST(FergusonKlass, ThresholdMode) {
  Rng rng(30);
  const LevySpec spec = LevySpec::gamma(2.0, 1.0);
  const double threshold = 1e-3;
  const int reps = 4000;
  double count = 0.0, total = 0.0;
  for (int i = 0; i < reps; ++i) {
    const JumpSet s = ferguson_klass_jumps(spec, JumpTruncation::above(threshold), rng);
    ASSERT_FALSE(s.jumps.empty());
    for (std::size_t k = 1; k < s.jumps.size(); ++k) {
      ASSERT_LT(s.jumps[k], s.jumps[k - 1]);
      ASSERT_GE(s.jumps[k], threshold);
    }
    EXPECT_LE(s.truncation_threshold, threshold);
    count += s.jumps.size();
    total += std::accumulate(s.jumps.begin(), s.jumps.end(), 0.0) + s.omitted_mass_mean;
  }
  // Number of jumps above the threshold is Poisson(T(threshold)); total mass
  // is Gamma(theta, beta).
  EXPECT_NEAR(count / reps, levy_tail(spec, threshold), 0.15);
  EXPECT_NEAR(total / reps, 2.0, 0.07);
}

TEST(FergusonKlass, CountModeAndTinyMass) {
  Rng rng(31);
  const JumpSet s = ferguson_klass_jumps(LevySpec::beta(1.0, 1.0), JumpTruncation::largest(25), rng);
  ASSERT_EQ(s.jumps.size(), 25u);
  EXPECT_EQ(s.truncation_threshold, s.jumps.back());
  EXPECT_TRUE(s.jumps.front() < 1.0);
  // With almost no mass above the threshold one jump is still kept.
  for (int i = 0; i < 100; ++i) {
    const JumpSet t = ferguson_klass_jumps(LevySpec::gamma(0.05, 1.0), JumpTruncation::above(0.5), rng);
    ASSERT_EQ(t.jumps.size() >= 1, true);
    EXPECT_LE(t.truncation_threshold, t.jumps.back());
  }
  EXPECT_THROW(JumpTruncation::above(0.0), std::domain_error);
  EXPECT_THROW(JumpTruncation::largest(0), std::domain_error);
}

TEST(ThinPoisson, Basics) {
  Rng rng(32);
  const std::vector<double> points = {0.1, 0.2, 0.3, 0.4};
  EXPECT_EQ(thin_poisson(points, [](double) { return 1.0; }, rng), points);
  EXPECT_TRUE(thin_poisson(points, [](double) { return 0.0; }, rng).empty());
  EXPECT_THROW(thin_poisson(points, [](double) { return 1.5; }, rng), std::domain_error);
  int kept = 0;
  const std::vector<double> one = {0.25};
  for (int i = 0; i < 20000; ++i) kept += thin_poisson(one, [](double w) { return w; }, rng).size();
  EXPECT_NEAR(kept / 20000.0, 0.25, 0.015);
}

TEST(BetaResidual, SelectionAndSampling) {
  Rng rng(33);
  const BetaResidual r{2.0, 1.5, 3};
  EXPECT_NEAR(r.selection_mass(), 2.0 * 1.5 / 4.5, 1e-12);
  EXPECT_NEAR(r.density(0.2), 2.0 * 1.5 / 0.2 * std::pow(0.8, 1.5 + 3 - 1), 1e-12);
  EXPECT_EQ(r.after_round().rounds, 4);
  double mean = 0.0;
  const int reps = 100000;
  for (int i = 0; i < reps; ++i) {
    const double w = r.sample_selected(rng);
    ASSERT_TRUE(w > 0.0 && w < 1.0);
    mean += w;
  }
  EXPECT_NEAR(mean / reps, 1.0 / (1.0 + 4.5), 0.002);
}

TEST(BetaRounds, PoissonCounts) {
  Rng rng(34);
  const IbpParams params(2.0, 1.0);
  const int reps = 20000;
  std::vector<double> mean(3, 0.0);
  for (int i = 0; i < reps; ++i) {
    const BetaRounds b = beta_round_simulation(params, 3, rng);
    ASSERT_EQ(b.jumps_per_round.size(), 3u);
    EXPECT_EQ(b.residual.rounds, 3);
    for (int m = 0; m < 3; ++m) mean[m] += b.jumps_per_round[m].size();
  }
  for (int m = 0; m < 3; ++m) EXPECT_NEAR(mean[m] / reps, 2.0 / (1.0 + m), 0.05) << m;
  EXPECT_THROW(beta_round_simulation(params, 0, rng), std::domain_error);
}

TEST(NormalizedAppearance, Basics) {
  Rng rng(35);
  JumpSet s;
  s.jumps = {3.0, 1.0};
  const AppearanceDraw d = normalized_jumps_by_appearance(s, 6, rng);
  EXPECT_EQ(d.partition.n(), 6);
  EXPECT_EQ(static_cast<int>(d.sticks.weights.size()), d.partition.num_blocks());
  EXPECT_LE(d.sticks.weights.sum(), 1.0 + 1e-15);
  // The first weight belongs to the atom chosen by index 1.
  EXPECT_DOUBLE_EQ(d.sticks.weights[0], s.jumps[d.atoms[0]] / 4.0);

  JumpSet empty;
  EXPECT_THROW(normalized_jumps_by_appearance(empty, 2, rng), std::invalid_argument);
  JumpSet drifted = s;
  drifted.drift = 0.1;
  EXPECT_THROW(normalized_jumps_by_appearance(drifted, 2, rng), std::domain_error);
}
