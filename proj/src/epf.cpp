#include "csp/epf.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "csp/enumerate.hpp"

namespace csp {

namespace {

double log_multinomial(const FeatureAllocation& f) {
  double value = std::lgamma(f.num_blocks() + 1.0);
  for (const auto& feature : f.features()) value -= std::lgamma(feature.multiplicity + 1.0);
  return value;
}

std::string sizes_string(std::span<const int> sizes) {
  std::ostringstream out;
  out << '(';
  for (std::size_t i = 0; i < sizes.size(); ++i) out << (i ? "," : "") << sizes[i];
  out << ')';
  return out.str();
}

}  // namespace

CrpParams::CrpParams(double theta_) : theta(theta_) {
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    throw std::domain_error("CrpParams: theta must be positive and finite");
  }
}

IbpParams::IbpParams(double gamma_, double theta_) : gamma(gamma_), theta(theta_) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw std::domain_error("IbpParams: gamma must be positive and finite");
  }
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    throw std::domain_error("IbpParams: theta must be positive and finite");
  }
}

double EpfValue::prob() const { return std::exp(log_prob); }

double rising_factorial_log(double x, int m, double a) {
  if (!(x > 0.0)) throw std::domain_error("rising_factorial_log: x must be positive");
  if (m < 0) throw std::domain_error("rising_factorial_log: negative m");
  if (a < 0.0) throw std::domain_error("rising_factorial_log: negative increment");
  if (m == 0) return 0.0;
  if (a == 0.0) return m * std::log(x);
  if (m <= 64) {
    double value = 0.0;
    for (int j = 0; j < m; ++j) value += std::log(x + j * a);
    return value;
  }
  const double ratio = x / a;
  return m * std::log(a) + std::lgamma(ratio + m) - std::lgamma(ratio);
}

// ---------------------------------------------------------------------------
// CRP

EpfValue eppf_crp(const CrpParams& params, std::span<const int> block_sizes) {
  if (block_sizes.empty()) throw std::domain_error("eppf_crp: empty size list");
  int n = 0;
  double value = 0.0;
  for (int size : block_sizes) {
    if (size < 1) throw std::domain_error("eppf_crp: block sizes must be >= 1");
    n += size;
    value += std::lgamma(static_cast<double>(size));
  }
  const int k = static_cast<int>(block_sizes.size());
  value += (k - 1) * std::log(params.theta);
  value -= rising_factorial_log(params.theta + 1.0, n - 1, 1.0);
  return {value};
}

EpfValue eppf_crp(const CrpParams& params, const Partition& p) {
  const std::vector<int> sizes = p.block_sizes();
  return eppf_crp(params, sizes);
}

Eigen::VectorXd crp_predict(const CrpParams& params, std::span<const int> counts) {
  Eigen::VectorXd probs(static_cast<Eigen::Index>(counts.size()) + 1);
  double n = 0.0;
  for (int c : counts) {
    if (c < 1) throw std::domain_error("crp_predict: counts must be >= 1");
    n += c;
  }
  const double denom = n + params.theta;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    probs[static_cast<Eigen::Index>(k)] = counts[k] / denom;
  }
  probs[probs.size() - 1] = params.theta / denom;
  return probs;
}

namespace {

// Seats one customer given current counts (total n). Same inverse-CDF scan as
// categorical(crp_predict(...)), without allocating the probability vector.
int crp_seat(const std::vector<int>& counts, int n, double theta, Rng& rng) {
  const double target = uniform(rng) * (n + theta);
  double cumulative = 0.0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    cumulative += counts[k];
    if (target < cumulative) return static_cast<int>(k);
  }
  return static_cast<int>(counts.size());
}

}  // namespace

std::vector<int> crp_table_counts(const CrpParams& params, int n, Rng& rng) {
  if (n < 1) throw std::domain_error("crp_table_counts: n must be >= 1");
  std::vector<int> counts;
  for (int i = 0; i < n; ++i) {
    const int table = crp_seat(counts, i, params.theta, rng);
    if (table == static_cast<int>(counts.size())) {
      counts.push_back(1);
    } else {
      ++counts[table];
    }
  }
  return counts;
}

Partition crp_sample(const CrpParams& params, int n, Rng& rng) {
  if (n < 1) throw std::domain_error("crp_sample: n must be >= 1");
  std::vector<int> counts;
  std::vector<Block> blocks;
  for (int i = 0; i < n; ++i) {
    const int table = crp_seat(counts, i, params.theta, rng);
    if (table == static_cast<int>(counts.size())) {
      counts.push_back(0);
      blocks.emplace_back();
    }
    ++counts[table];
    blocks[table].push_back(i + 1);
  }
  return Partition(n, std::move(blocks));
}

// ---------------------------------------------------------------------------
// IBP

double ordered_from_unordered_log(const FeatureAllocation& f, double unordered_log_prob) {
  return unordered_log_prob - log_multinomial(f);
}

double unordered_from_ordered_log(const FeatureAllocation& f, double ordered_log_prob) {
  return ordered_log_prob + log_multinomial(f);
}

EpfValue efpf_ibp(const IbpParams& params, int n, std::span<const int> block_sizes) {
  if (n < 1) throw std::domain_error("efpf_ibp: n must be >= 1");
  const double theta = params.theta;
  const double mass = params.theta * params.gamma;
  const int k = static_cast<int>(block_sizes.size());

  double harmonic = 0.0;
  for (int m = 1; m <= n; ++m) harmonic += 1.0 / (theta + m - 1.0);

  double value = -std::lgamma(k + 1.0) + k * std::log(mass) - mass * harmonic;
  const double log_gamma_n_theta = std::lgamma(n + theta);
  for (int size : block_sizes) {
    if (size < 1 || size > n) throw std::domain_error("efpf_ibp: block size outside 1..n");
    value += std::lgamma(static_cast<double>(size)) + std::lgamma(n - size + theta) -
             log_gamma_n_theta;
  }
  return {value};
}

EpfValue ibp_allocation_log_prob(const IbpParams& params, const FeatureAllocation& f) {
  const std::vector<int> sizes = f.block_sizes();
  const EpfValue ordered = efpf_ibp(params, f.n(), sizes);
  return {unordered_from_ordered_log(f, ordered.log_prob)};
}

IbpPrediction ibp_predict(const IbpParams& params, int n_next, std::span<const int> counts) {
  if (n_next < 1) throw std::domain_error("ibp_predict: n_next must be >= 1");
  const double denom = params.theta + n_next - 1.0;
  IbpPrediction out;
  out.inclusion.resize(static_cast<Eigen::Index>(counts.size()));
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (counts[k] < 0 || counts[k] > n_next - 1) {
      throw std::domain_error("ibp_predict: dish count outside 0..n_next-1");
    }
    out.inclusion[static_cast<Eigen::Index>(k)] = counts[k] / denom;
  }
  out.new_dish_rate = params.theta * params.gamma / denom;
  return out;
}

FeatureAllocation ibp_sample(const IbpParams& params, int n, Rng& rng) {
  if (n < 1) throw std::domain_error("ibp_sample: n must be >= 1");
  std::vector<Block> dishes;
  for (int customer = 1; customer <= n; ++customer) {
    const double denom = params.theta + customer - 1.0;
    for (Block& dish : dishes) {
      if (bernoulli(static_cast<double>(dish.size()) / denom, rng)) dish.push_back(customer);
    }
    const int fresh = poisson_variate(params.theta * params.gamma / denom, rng);
    for (int j = 0; j < fresh; ++j) dishes.push_back({customer});
  }
  return FeatureAllocation(n, std::move(dishes));
}

// ---------------------------------------------------------------------------
// Validity checking

EpfValidityReport eppf_validity_check(const EppfCandidate& candidate, int n_max, double tol) {
  if (n_max < 1 || n_max > 10) throw std::domain_error("eppf_validity_check: n_max must be in 1..10");
  EpfValidityReport report;

  auto fail = [&report](EpfCheck& check, const char* name, int n, double error,
                        const std::string& detail) {
    check.max_error = std::max(check.max_error, error);
    if (!check.passed) return;
    check.passed = false;
    check.first_failing_n = n;
    check.detail = detail;
    if (report.first_violation.empty()) {
      report.first_violation = std::string(name) + " at n=" + std::to_string(n) + ": " + detail;
    }
  };
  auto track = [](EpfCheck& check, double error) { check.max_error = std::max(check.max_error, error); };

  std::vector<Partition> previous;
  for (int n = 1; n <= n_max; ++n) {
    const std::vector<Partition> partitions = enumerate_partitions(n);

    // Symmetry over each distinct size multiset.
    std::set<std::vector<int>> shapes;
    for (const Partition& p : partitions) {
      std::vector<int> sizes = p.block_sizes();
      std::sort(sizes.begin(), sizes.end());
      shapes.insert(sizes);
    }
    for (std::vector<int> sizes : shapes) {
      const double reference = candidate(sizes);
      do {
        const double value = candidate(sizes);
        const double error = std::fabs(value - reference);
        if (error > tol) {
          fail(report.symmetry, "symmetry", n, error,
               "p" + sizes_string(sizes) + " differs from its sorted permutation");
        } else {
          track(report.symmetry, error);
        }
      } while (std::next_permutation(sizes.begin(), sizes.end()));
    }

    // Additivity from [n-1] to [n].
    for (const Partition& p : previous) {
      std::vector<int> sizes = p.block_sizes();
      const double parent = candidate(sizes);
      double children = 0.0;
      for (std::size_t k = 0; k < sizes.size(); ++k) {
        ++sizes[k];
        children += candidate(sizes);
        --sizes[k];
      }
      sizes.push_back(1);
      children += candidate(sizes);
      sizes.pop_back();
      const double error = std::fabs(parent - children);
      if (error > tol) {
        std::ostringstream detail;
        detail.precision(12);
        detail << "p" << sizes_string(sizes) << " = " << parent << " but its extensions sum to "
               << children;
        fail(report.additivity, "additivity", n, error, detail.str());
      } else {
        track(report.additivity, error);
      }
    }

    // Normalization over partitions of [n].
    double total = 0.0;
    for (const Partition& p : partitions) total += candidate(p.block_sizes());
    const double norm_error = std::fabs(total - 1.0);
    if (norm_error > tol) {
      std::ostringstream detail;
      detail.precision(12);
      detail << "sum over partitions is " << total;
      fail(report.normalization, "normalization", n, norm_error, detail.str());
    } else {
      track(report.normalization, norm_error);
    }
    previous = partitions;
  }
  return report;
}

}  // namespace csp
