#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "csp/alloc.hpp"
#include "csp/epf.hpp"
#include "csp/random.hpp"

namespace csp {

/// Requested operation needs something the model does not provide, e.g. a
/// posterior predictive from a non-conjugate likelihood.
class UnsupportedConfiguration : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sufficient statistics of univariate observations in one block.
struct GaussianStats {
  int count = 0;
  double sum = 0.0;
  double sum_sq = 0.0;

  void add(double x) {
    ++count;
    sum += x;
    sum_sq += x * x;
  }
  void remove(double x) {
    --count;
    sum -= x;
    sum_sq -= x * x;
  }
};

struct ClusterParam {
  double mean = 0.0;
  double variance = 1.0;
};

/// Per-cluster likelihood for univariate data.
class ClusterLikelihood {
 public:
  virtual ~ClusterLikelihood() = default;

  virtual std::string name() const = 0;
  virtual double log_density(double x, const ClusterParam& param) const = 0;
  virtual ClusterParam sample_prior(Rng& rng) const = 0;

  virtual bool conjugate() const { return false; }
  /// log p(x | data already in the block), parameters integrated out.
  virtual double log_predictive(const GaussianStats& block, double x) const;
  /// log p(block data), parameters integrated out.
  virtual double log_marginal(const GaussianStats& block) const;
  virtual ClusterParam sample_posterior(const GaussianStats& block, Rng& rng) const;
};

/// x ~ N(mu, s2), mu | s2 ~ N(m0, s2 / kappa0), s2 ~ InvGamma(a0, b0).
class NormalNigLikelihood : public ClusterLikelihood {
 public:
  double m0 = 0.0;
  double kappa0 = 0.1;
  double a0 = 2.0;
  double b0 = 1.0;

  NormalNigLikelihood() = default;
  NormalNigLikelihood(double m0_, double kappa0_, double a0_, double b0_);

  std::string name() const override { return "normal-nig"; }
  double log_density(double x, const ClusterParam& param) const override;
  ClusterParam sample_prior(Rng& rng) const override;
  bool conjugate() const override { return true; }
  double log_predictive(const GaussianStats& block, double x) const override;
  double log_marginal(const GaussianStats& block) const override;
  ClusterParam sample_posterior(const GaussianStats& block, Rng& rng) const override;

  struct Posterior {
    double m, kappa, a, b;
  };
  Posterior posterior(const GaussianStats& block) const;
};

/// Collapsed CRP mixture state. Blocks are numbered in order of first
/// appearance among the data indices.
struct MixtureState {
  std::vector<int> assignments;      // block of each index
  std::vector<GaussianStats> blocks;
  CrpParams params;

  int num_blocks() const { return static_cast<int>(blocks.size()); }
  Partition partition() const;
};

MixtureState make_mixture_state(const CrpParams& params, std::span<const double> data,
                                std::vector<int> assignments);

/// Conditional law of the block of index i given every other assignment.
/// Entry j < blocks.size() is existing block j after index i is removed
/// (renumbered in appearance order without i); the last entry is a new block.
struct GibbsConditional {
  Eigen::VectorXd probs;
  Partition rest;  // partition of the other indices, relabeled 1..n-1
};

GibbsConditional crp_gibbs_conditional(const MixtureState& state, std::span<const double> data,
                                       const ClusterLikelihood& model, int i);

/// One fixed-order scan over indices 0..n-1, each resampled from
/// crp_predict(counts without it) times the posterior predictive.
/// Throws UnsupportedConfiguration for a non-conjugate model.
void crp_gibbs_sweep(MixtureState& state, std::span<const double> data,
                     const ClusterLikelihood& model, Rng& rng);

/// log P(partition) + sum of block log marginals.
double mixture_log_joint(const MixtureState& state, const ClusterLikelihood& model);

std::vector<ClusterParam> sample_cluster_parameters(const MixtureState& state,
                                                    const ClusterLikelihood& model, Rng& rng);

struct MixtureSample {
  MixtureState state;
  std::vector<double> data;
};

/// Forward simulation: partition from the CRP, parameters from the prior,
/// data from the likelihood.
MixtureSample crp_mixture_forward(const CrpParams& params, const ClusterLikelihood& model, int n,
                                  Rng& rng);

/// Draws cluster parameters given (partition, data) and then fresh data
/// given (partition, parameters).
void regenerate_mixture_data(MixtureSample& sample, const ClusterLikelihood& model, Rng& rng);

/// Linear-Gaussian binary factor model X = Z A + noise, rows of A i.i.d.
/// N(0, feature_sd^2 I), noise i.i.d. N(0, noise_sd^2).
struct LinearGaussianModel {
  double noise_sd = 0.5;
  double feature_sd = 1.0;

  LinearGaussianModel() = default;
  LinearGaussianModel(double noise_sd_, double feature_sd_);
};

struct FeatureState {
  Eigen::MatrixXi z;  // n x K memberships
  Eigen::MatrixXd a;  // K x D feature loadings
  IbpParams params;

  int num_features() const { return static_cast<int>(z.cols()); }
  FeatureAllocation allocation() const;
};

struct IbpSweepOptions {
  /// Rows with at most this many shared features draw all of those
  /// memberships jointly from their exact conditional (2^K terms); larger
  /// rows, or 0 here, use one Bernoulli update per entry.
  int joint_row_limit = 8;
};

/// One scan: for each index, memberships of features shared with other
/// indices are Gibbs-updated with prior odds from ibp_predict; features
/// owned by that index alone are replaced by a Metropolis move proposing
/// Poisson(gamma theta / (theta + n - 1)) fresh features with prior loadings.
/// Dead features are pruned and A is redrawn from its Gaussian conditional.
void ibp_gibbs_sweep(FeatureState& state, const Eigen::MatrixXd& data,
                     const LinearGaussianModel& model, Rng& rng,
                     const IbpSweepOptions& options = {});

double feature_log_likelihood(const FeatureState& state, const Eigen::MatrixXd& data,
                              const LinearGaussianModel& model);
double feature_log_joint(const FeatureState& state, const Eigen::MatrixXd& data,
                         const LinearGaussianModel& model);

/// Removes all-zero columns of z and the matching rows of a.
void prune_dead_features(FeatureState& state);

struct FeatureSample {
  FeatureState state;
  Eigen::MatrixXd data;
};

FeatureSample ibp_model_forward(const IbpParams& params, const LinearGaussianModel& model, int n,
                                int dims, Rng& rng);

/// Fresh data given (z, a).
void regenerate_feature_data(FeatureSample& sample, const LinearGaussianModel& model, Rng& rng);

double adjusted_rand_index(const Partition& a, const Partition& b);

/// Fraction of draws in which indices i and j share a block.
Eigen::MatrixXd co_clustering(std::span<const Partition> draws);

struct JointConsistencyReport {
  std::string statistic;
  int reps = 0;
  double forward_mean = 0.0;
  double forward_se = 0.0;
  double chain_mean = 0.0;
  double chain_se = 0.0;  // batch means
  double z = 0.0;
};

/// Getting-it-right check. Compares the mean of `statistic` under
/// independent forward draws with its mean along a chain that alternates
/// `transition` (structure and parameter updates given data) with data
/// regeneration, started from a forward draw. Both chains target the same
/// joint law, so |z| should be small when the transition is correct.
template <class State>
JointConsistencyReport joint_consistency_test(const std::function<State(Rng&)>& forward,
                                              const std::function<void(State&, Rng&)>& transition,
                                              const std::function<double(const State&)>& statistic,
                                              int reps, Rng& rng, std::string name = "statistic") {
  if (reps < 100) throw std::domain_error("joint_consistency_test: reps must be >= 100");
  JointConsistencyReport report;
  report.statistic = std::move(name);
  report.reps = reps;

  double sum = 0.0;
  double sum_sq = 0.0;
  for (int r = 0; r < reps; ++r) {
    const double s = statistic(forward(rng));
    sum += s;
    sum_sq += s * s;
  }
  report.forward_mean = sum / reps;
  const double var = std::max(0.0, sum_sq / reps - report.forward_mean * report.forward_mean);
  report.forward_se = std::sqrt(var / reps);

  State state = forward(rng);
  std::vector<double> series;
  series.reserve(reps);
  for (int r = 0; r < reps; ++r) {
    transition(state, rng);
    series.push_back(statistic(state));
  }
  const int batches = 50;
  const int batch_len = reps / batches;
  double batch_sum = 0.0;
  double batch_sum_sq = 0.0;
  for (int b = 0; b < batches; ++b) {
    double mean = 0.0;
    for (int j = 0; j < batch_len; ++j) mean += series[b * batch_len + j];
    mean /= batch_len;
    batch_sum += mean;
    batch_sum_sq += mean * mean;
  }
  report.chain_mean = batch_sum / batches;
  const double batch_var =
      std::max(0.0, (batch_sum_sq - batches * report.chain_mean * report.chain_mean) / (batches - 1));
  report.chain_se = std::sqrt(batch_var / batches);
  const double se = std::hypot(report.forward_se, report.chain_se);
  report.z = se > 0.0 ? (report.forward_mean - report.chain_mean) / se : 0.0;
  return report;
}

}  // namespace csp
