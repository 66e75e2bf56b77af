#pragma once

#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "csp/alloc.hpp"
#include "csp/epf.hpp"
#include "csp/random.hpp"

namespace csp {

enum class StickKind { partition, feature };

/// A finite prefix of block or feature frequencies.
///
/// Partition kind: weights sum to at most one and tail_mass_bound is the
/// realized leftover mass 1 - sum(weights).
/// Feature kind: weights are independent frequencies in (0,1];
/// tail_mass_bound is the expected total frequency of sticks not drawn.
///
/// Sticks built round by round (IBP, beta process) carry first_round: the
/// index that first exhibits the stick. That index is a member by
/// construction, earlier indices are not, later ones are Bernoulli(weight).
struct StickWeights {
  Eigen::VectorXd weights;
  StickKind kind = StickKind::partition;
  int truncation = 0;  // number of sticks kept
  double tail_mass_bound = 0.0;
  int rounds = 0;                // rounds simulated, round-built sticks only
  std::vector<int> first_round;  // empty unless round-built

  bool round_built() const { return !first_round.empty() || rounds > 0; }
};

struct GemParams {
  double theta = 1.0;

  explicit GemParams(double theta_ = 1.0);
};

/// Thrown when a truncated stick set leaves more mass than the caller allows.
class TruncationError : public std::runtime_error {
 public:
  TruncationError(double tail_mass, double tolerance, int required_k);

  double tail_mass() const { return tail_mass_; }
  double tolerance() const { return tolerance_; }
  /// Estimated number of sticks needed to get below tolerance.
  int required_k() const { return required_k_; }

 private:
  double tail_mass_;
  double tolerance_;
  int required_k_;
};

/// Default refusal threshold for paintbox draws from truncated sticks.
inline constexpr double kDefaultTailTolerance = 1e-6;

/// K GEM(theta) sticks: V_k ~ Beta(1, theta) i.i.d., p_k = V_k prod_{j<k}(1 - V_j).
StickWeights gem_sticks(const GemParams& params, int k, Rng& rng);

/// Smallest K with (theta / (1 + theta))^K <= tail_target.
int gem_expected_truncation(const GemParams& params, double tail_target);

/// Starts from gem_expected_truncation and keeps breaking until the realized
/// tail mass is at most tail_target.
StickWeights gem_sticks_to_tolerance(const GemParams& params, double tail_target, Rng& rng);

/// Kingman paintbox: n i.i.d. categorical draws from the sticks, induced
/// partition returned. Leftover mass is spread over the kept sticks by
/// renormalizing. Throws TruncationError if tail_mass_bound > tolerance and
/// std::invalid_argument for feature-kind sticks.
Partition paintbox_partition(const StickWeights& sticks, int n, Rng& rng,
                             double tolerance = kDefaultTailTolerance);

/// IBP sticks over n_rounds rounds: round m adds Poisson(gamma theta /
/// (theta + m - 1)) sticks, each Beta(1, theta + m - 1).
StickWeights ibp_sticks(const IbpParams& params, int n_rounds, Rng& rng);

/// Independent Bernoulli membership of indices 1..n in each stick.
/// Round-built sticks follow the first_round rule above and require
/// n <= rounds. Features with no members are dropped. Throws
/// std::domain_error for a weight outside (0,1].
FeatureAllocation bernoulli_featurize(const StickWeights& sticks, int n, Rng& rng);

}  // namespace csp
