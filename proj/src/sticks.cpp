#include "csp/sticks.hpp"

#include <cmath>
#include <sstream>

namespace csp {

namespace {

std::string truncation_message(double tail_mass, double tolerance, int required_k) {
  std::ostringstream out;
  out << "stick tail mass " << tail_mass << " exceeds tolerance " << tolerance
      << "; about " << required_k << " sticks are required";
  return out.str();
}

void break_stick(double theta, double& remaining, std::vector<double>& weights, Rng& rng) {
  const double v = beta_variate(1.0, theta, rng);
  weights.push_back(remaining * v);
  remaining *= 1.0 - v;
}

StickWeights pack_partition_sticks(const std::vector<double>& weights, double remaining) {
  StickWeights sticks;
  sticks.kind = StickKind::partition;
  sticks.weights = Eigen::Map<const Eigen::VectorXd>(weights.data(),
                                                     static_cast<Eigen::Index>(weights.size()));
  sticks.truncation = static_cast<int>(weights.size());
  sticks.tail_mass_bound = remaining;
  return sticks;
}

}  // namespace

GemParams::GemParams(double theta_) : theta(theta_) {
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    throw std::domain_error("GemParams: theta must be positive and finite");
  }
}

TruncationError::TruncationError(double tail_mass, double tolerance, int required_k)
    : std::runtime_error(truncation_message(tail_mass, tolerance, required_k)),
      tail_mass_(tail_mass),
      tolerance_(tolerance),
      required_k_(required_k) {}

StickWeights gem_sticks(const GemParams& params, int k, Rng& rng) {
  if (k < 1) throw std::domain_error("gem_sticks: K must be >= 1");
  std::vector<double> weights;
  weights.reserve(k);
  double remaining = 1.0;
  for (int j = 0; j < k; ++j) break_stick(params.theta, remaining, weights, rng);
  return pack_partition_sticks(weights, remaining);
}

int gem_expected_truncation(const GemParams& params, double tail_target) {
  if (!(tail_target > 0.0) || tail_target >= 1.0) {
    throw std::domain_error("gem_expected_truncation: target must be in (0,1)");
  }
  const double ratio = params.theta / (1.0 + params.theta);
  return std::max(1, static_cast<int>(std::ceil(std::log(tail_target) / std::log(ratio))));
}

StickWeights gem_sticks_to_tolerance(const GemParams& params, double tail_target, Rng& rng) {
  const int k0 = gem_expected_truncation(params, tail_target);
  std::vector<double> weights;
  weights.reserve(k0 + 8);
  double remaining = 1.0;
  while (static_cast<int>(weights.size()) < k0 || remaining > tail_target) {
    break_stick(params.theta, remaining, weights, rng);
  }
  return pack_partition_sticks(weights, remaining);
}

Partition paintbox_partition(const StickWeights& sticks, int n, Rng& rng, double tolerance) {
  if (sticks.kind != StickKind::partition) {
    throw std::invalid_argument("paintbox_partition: feature-kind sticks");
  }
  if (n < 0) throw std::domain_error("paintbox_partition: negative n");
  if (sticks.weights.size() == 0 || sticks.tail_mass_bound > tolerance) {
    int required = 1;
    const double k = static_cast<double>(sticks.weights.size());
    if (k > 0 && sticks.tail_mass_bound > 0.0 && sticks.tail_mass_bound < 1.0) {
      required = static_cast<int>(std::ceil(k * std::log(tolerance) / std::log(sticks.tail_mass_bound)));
    }
    throw TruncationError(sticks.tail_mass_bound, tolerance, required);
  }
  std::vector<int> labels(n);
  for (int i = 0; i < n; ++i) labels[i] = categorical(sticks.weights, rng);
  return induced_partition(labels);
}

StickWeights ibp_sticks(const IbpParams& params, int n_rounds, Rng& rng) {
  if (n_rounds < 1) throw std::domain_error("ibp_sticks: n_rounds must be >= 1");
  std::vector<double> weights;
  StickWeights sticks;
  sticks.kind = StickKind::feature;
  for (int m = 1; m <= n_rounds; ++m) {
    const double b = params.theta + m - 1.0;
    const int fresh = poisson_variate(params.gamma * params.theta / b, rng);
    for (int j = 0; j < fresh; ++j) {
      weights.push_back(beta_variate(1.0, b, rng));
      sticks.first_round.push_back(m);
    }
  }
  sticks.weights = Eigen::Map<const Eigen::VectorXd>(weights.data(),
                                                     static_cast<Eigen::Index>(weights.size()));
  sticks.truncation = static_cast<int>(weights.size());
  sticks.rounds = n_rounds;
  // Expected total weight left in the beta process after n_rounds thinnings.
  sticks.tail_mass_bound = params.gamma * params.theta / (params.theta + n_rounds);
  return sticks;
}

FeatureAllocation bernoulli_featurize(const StickWeights& sticks, int n, Rng& rng) {
  if (sticks.kind != StickKind::feature) {
    throw std::invalid_argument("bernoulli_featurize: partition-kind sticks");
  }
  if (n < 0) throw std::domain_error("bernoulli_featurize: negative n");
  const Eigen::Index k = sticks.weights.size();
  for (Eigen::Index j = 0; j < k; ++j) {
    const double w = sticks.weights[j];
    if (!(w > 0.0) || w > 1.0) throw std::domain_error("bernoulli_featurize: weight outside (0,1]");
  }
  const bool tagged = sticks.round_built();
  if (tagged && n > sticks.rounds) {
    throw std::domain_error("bernoulli_featurize: n exceeds the rounds simulated for these sticks");
  }
  if (tagged && static_cast<Eigen::Index>(sticks.first_round.size()) != k) {
    throw std::invalid_argument("bernoulli_featurize: first_round length differs from weights");
  }
  std::vector<Block> blocks(static_cast<std::size_t>(k));
  for (int i = 1; i <= n; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      if (tagged) {
        const int first = sticks.first_round[j];
        if (i < first) continue;
        if (i == first) {
          blocks[j].push_back(i);
          continue;
        }
      }
      if (bernoulli(sticks.weights[j], rng)) blocks[j].push_back(i);
    }
  }
  std::erase_if(blocks, [](const Block& b) { return b.empty(); });
  return FeatureAllocation(n, std::move(blocks));
}

}  // namespace csp
