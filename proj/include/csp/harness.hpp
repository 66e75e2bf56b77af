#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "csp/alloc.hpp"
#include "csp/random.hpp"

namespace csp {

// Replicates run on a worker pool. Replicate r of a sampler tagged `tag`
// always draws from Rng(seed, (tag << 32) | r), whichever worker runs it, so
// results do not depend on the thread count.

struct ReplicatePlan {
  std::uint64_t seed = 0;
  std::uint64_t tag = 0;  // < 2^32
  long reps = 1;
  int threads = 0;        // 0 = hardware concurrency

  Rng stream(long replicate) const { return Rng(seed, (tag << 32) | static_cast<std::uint64_t>(replicate)); }
};

/// Runs job(r, rng) for r in 0..reps-1 across the pool.
void run_replicates(const ReplicatePlan& plan, const std::function<void(long, Rng&)>& job);

/// Sampler emitting a canonical key, e.g. format(partition).
using KeySampler = std::function<std::string(Rng&)>;
using ScalarSampler = std::function<double(Rng&)>;

using Histogram = std::map<std::string, long>;

Histogram sample_histogram(const KeySampler& sampler, const ReplicatePlan& plan);
std::vector<double> sample_scalars(const ScalarSampler& sampler, const ReplicatePlan& plan);

/// 1/2 sum |p_a - p_b| over the union of keys.
double tvd(const Histogram& a, const Histogram& b);

/// TVD between an empirical histogram and an exact law over keys.
double tvd(const Histogram& empirical, const std::map<std::string, double>& exact);

/// Kolmogorov-Smirnov sup distance between the empirical CDF of samples and
/// cdf. Throws std::invalid_argument for fewer than 100 samples.
double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf);

/// Key of a feature allocation's block-size profile, e.g. "[2,1,1]".
std::string size_profile_key(const FeatureAllocation& f);

struct EquivalenceReport {
  std::string name;
  std::string sampler_a;
  std::string sampler_b;
  std::string statistic;  // "tvd" or "ks"
  double distance = 0.0;
  double tolerance = 0.0;
  long reps_a = 0;
  long reps_b = 0;
  bool passed = false;
  double runtime_seconds = 0.0;
};

/// Empirical TVD between two key samplers with independent stream tags.
EquivalenceReport tvd_equivalence(const std::string& name_a, const KeySampler& a, const std::string& name_b,
                                  const KeySampler& b, long reps, std::uint64_t seed, double tolerance,
                                  int threads = 0);

/// KS distance of a scalar sampler against a reference CDF.
EquivalenceReport ks_equivalence(const std::string& name, const ScalarSampler& sampler,
                                 const std::string& reference, const std::function<double(double)>& cdf,
                                 long reps, std::uint64_t seed, double tolerance, int threads = 0);

/// Beta(1, b) CDF 1 - (1 - x)^b.
double beta1_cdf(double b, double x);

}  // namespace csp
