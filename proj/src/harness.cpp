#include "csp/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <set>
#include <stdexcept>
#include <thread>

namespace csp {

void run_replicates(const ReplicatePlan& plan, const std::function<void(long, Rng&)>& job) {
  if (plan.reps < 1) throw std::domain_error("run_replicates: reps must be >= 1");
  if (plan.tag >= (std::uint64_t{1} << 32)) throw std::domain_error("run_replicates: tag must fit in 32 bits");
  int threads = plan.threads > 0 ? plan.threads : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp<long>(threads, 1, std::min<long>(plan.reps, 64));
  auto run_one = [&](long r) {
    Rng rng = plan.stream(r);
    job(r, rng);
  };
  if (threads == 1) {
    for (long r = 0; r < plan.reps; ++r) run_one(r);
    return;
  }
  std::atomic<long> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (long r = next++; r < plan.reps; r = next++) {
        try {
          run_one(r);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = plan.reps;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

Histogram sample_histogram(const KeySampler& sampler, const ReplicatePlan& plan) {
  std::vector<std::string> keys(static_cast<std::size_t>(plan.reps));
  run_replicates(plan, [&](long r, Rng& rng) { keys[static_cast<std::size_t>(r)] = sampler(rng); });
  Histogram h;
  for (auto& k : keys) ++h[std::move(k)];
  return h;
}

std::vector<double> sample_scalars(const ScalarSampler& sampler, const ReplicatePlan& plan) {
  std::vector<double> values(static_cast<std::size_t>(plan.reps));
  run_replicates(plan, [&](long r, Rng& rng) { values[static_cast<std::size_t>(r)] = sampler(rng); });
  return values;
}

namespace {

long total(const Histogram& h) {
  long sum = 0;
  for (const auto& [key, count] : h) sum += count;
  return sum;
}

}  // namespace

double tvd(const Histogram& a, const Histogram& b) {
  const double na = static_cast<double>(total(a));
  const double nb = static_cast<double>(total(b));
  if (na == 0.0 || nb == 0.0) throw std::invalid_argument("tvd: empty histogram");
  std::set<std::string> keys;
  for (const auto& [k, c] : a) keys.insert(k);
  for (const auto& [k, c] : b) keys.insert(k);
  double sum = 0.0;
  for (const auto& k : keys) {
    const auto ia = a.find(k);
    const auto ib = b.find(k);
    const double pa = ia == a.end() ? 0.0 : ia->second / na;
    const double pb = ib == b.end() ? 0.0 : ib->second / nb;
    sum += std::fabs(pa - pb);
  }
  return 0.5 * sum;
}

double tvd(const Histogram& empirical, const std::map<std::string, double>& exact) {
  const double n = static_cast<double>(total(empirical));
  if (n == 0.0) throw std::invalid_argument("tvd: empty histogram");
  double sum = 0.0;
  for (const auto& [k, p] : exact) {
    const auto it = empirical.find(k);
    sum += std::fabs((it == empirical.end() ? 0.0 : it->second / n) - p);
  }
  for (const auto& [k, c] : empirical) {
    if (!exact.count(k)) sum += c / n;
  }
  return 0.5 * sum;
}

double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.size() < 100) throw std::invalid_argument("ks_distance: need at least 100 samples");
  std::sort(samples.begin(), samples.end());
  const double m = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, (i + 1) / m - f, f - i / m});
  }
  return d;
}

std::string size_profile_key(const FeatureAllocation& f) {
  std::string key = "[";
  const std::vector<int> sizes = f.block_sizes();
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (i) key += ',';
    key += std::to_string(sizes[i]);
  }
  return key + "]";
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

EquivalenceReport tvd_equivalence(const std::string& name_a, const KeySampler& a, const std::string& name_b,
                                  const KeySampler& b, long reps, std::uint64_t seed, double tolerance,
                                  int threads) {
  const auto start = std::chrono::steady_clock::now();
  const Histogram ha = sample_histogram(a, {seed, 1, reps, threads});
  const Histogram hb = sample_histogram(b, {seed, 2, reps, threads});
  EquivalenceReport report;
  report.name = name_a + " vs " + name_b;
  report.sampler_a = name_a;
  report.sampler_b = name_b;
  report.statistic = "tvd";
  report.distance = tvd(ha, hb);
  report.tolerance = tolerance;
  report.reps_a = reps;
  report.reps_b = reps;
  report.passed = report.distance <= tolerance;
  report.runtime_seconds = seconds_since(start);
  return report;
}

EquivalenceReport ks_equivalence(const std::string& name, const ScalarSampler& sampler,
                                 const std::string& reference, const std::function<double(double)>& cdf,
                                 long reps, std::uint64_t seed, double tolerance, int threads) {
  const auto start = std::chrono::steady_clock::now();
  EquivalenceReport report;
  report.name = name + " vs " + reference;
  report.sampler_a = name;
  report.sampler_b = reference;
  report.statistic = "ks";
  report.distance = ks_distance(sample_scalars(sampler, {seed, 3, reps, threads}), cdf);
  report.tolerance = tolerance;
  report.reps_a = reps;
  report.passed = report.distance <= tolerance;
  report.runtime_seconds = seconds_since(start);
  return report;
}

double beta1_cdf(double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return -std::expm1(b * std::log1p(-x));
}

}  // namespace csp
