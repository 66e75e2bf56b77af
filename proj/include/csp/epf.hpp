#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "csp/alloc.hpp"
#include "csp/random.hpp"

namespace csp {

/// Chinese restaurant process concentration.
struct CrpParams {
  double theta = 1.0;

  explicit CrpParams(double theta_ = 1.0);
};

/// Indian buffet process: gamma is the mass, theta the concentration.
struct IbpParams {
  double gamma = 1.0;
  double theta = 1.0;

  IbpParams(double gamma_ = 1.0, double theta_ = 1.0);
};

/// A probability on the natural-log scale; -inf marks an impossible
/// configuration.
struct EpfValue {
  double log_prob = 0.0;

  double prob() const;
};

/// log prod_{j=0}^{m-1} (x + j a).
double rising_factorial_log(double x, int m, double a = 1.0);

/// CRP exchangeable partition probability function
///   theta^{K-1} prod_k (N_k - 1)! / (theta + 1)_{N-1}.
/// Throws std::domain_error for an empty list or a zero size.
EpfValue eppf_crp(const CrpParams& params, std::span<const int> block_sizes);
EpfValue eppf_crp(const CrpParams& params, const Partition& p);

/// Seating probabilities for the next customer: entry k is N_k / (N + theta),
/// the final entry theta / (N + theta).
Eigen::VectorXd crp_predict(const CrpParams& params, std::span<const int> counts);

/// Table counts in order of appearance after n sequential seatings.
std::vector<int> crp_table_counts(const CrpParams& params, int n, Rng& rng);

/// Sequential CRP draw of a partition of [n].
Partition crp_sample(const CrpParams& params, int n, Rng& rng);

/// Ordered-allocation probability from the unordered one: subtracts
/// log(K! / (rho_1! ... rho_H!)).
double ordered_from_unordered_log(const FeatureAllocation& f, double unordered_log_prob);

/// Inverse of ordered_from_unordered_log.
double unordered_from_ordered_log(const FeatureAllocation& f, double ordered_log_prob);

/// IBP exchangeable feature probability function for a uniformly ordered
/// feature allocation of [n] with the given block sizes:
///   (1/K!) (theta gamma)^K exp(-theta gamma sum_{m=1}^n 1/(theta+m-1))
///     prod_k Gamma(N_k) Gamma(n - N_k + theta) / Gamma(n + theta).
/// Throws std::domain_error if a size is outside 1..n.
EpfValue efpf_ibp(const IbpParams& params, int n, std::span<const int> block_sizes);

/// Probability of the unordered feature allocation under the IBP.
EpfValue ibp_allocation_log_prob(const IbpParams& params, const FeatureAllocation& f);

struct IbpPrediction {
  Eigen::VectorXd inclusion;  // per existing dish
  double new_dish_rate = 0.0;  // Poisson mean of new dishes
};

/// Prediction rule for customer n_next given dish popularities among the
/// first n_next - 1 customers.
IbpPrediction ibp_predict(const IbpParams& params, int n_next, std::span<const int> counts);

/// Sequential IBP draw of a feature allocation of [n].
FeatureAllocation ibp_sample(const IbpParams& params, int n, Rng& rng);

/// Candidate EPPF on the probability scale, called with block sizes.
using EppfCandidate = std::function<double(std::span<const int>)>;

struct EpfCheck {
  bool passed = true;
  int first_failing_n = 0;  // 0 when passed
  double max_error = 0.0;
  std::string detail;
};

struct EpfValidityReport {
  EpfCheck symmetry;
  EpfCheck additivity;
  EpfCheck normalization;
  std::string first_violation;  // empty when all checks pass

  bool passed() const { return symmetry.passed && additivity.passed && normalization.passed; }
};

/// Checks a candidate EPPF on every partition of [n], n = 1..n_max:
/// symmetry under permutation of its arguments, additivity p(sizes of
/// [n-1]) = sum over the one-index extensions, and normalization over the
/// partitions of [n]. For each n the checks run in that order; the first
/// violation met is reported in first_violation.
EpfValidityReport eppf_validity_check(const EppfCandidate& candidate, int n_max, double tol);

}  // namespace csp
