#pragma once

// Independent reference computations used by the tests. Nothing here calls
// into the library's probability code.

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <vector>

namespace oracle {

using Blocks = std::vector<std::vector<int>>;

/// Bell numbers by the triangle recurrence.
inline std::int64_t bell(int n) {
  std::vector<std::int64_t> row = {1};
  for (int i = 0; i < n; ++i) {
    std::vector<std::int64_t> next = {row.back()};
    for (std::int64_t v : row) next.push_back(next.back() + v);
    row = next;
  }
  return row.front();
}

/// All set partitions of {1..n}, by inserting n into each block of each
/// partition of {1..n-1} or opening a new block.
inline std::vector<Blocks> partitions(int n) {
  if (n == 0) return {Blocks{}};
  std::vector<Blocks> out;
  for (const Blocks& p : partitions(n - 1)) {
    for (std::size_t k = 0; k < p.size(); ++k) {
      Blocks q = p;
      q[k].push_back(n);
      out.push_back(q);
    }
    Blocks q = p;
    q.push_back({n});
    out.push_back(q);
  }
  return out;
}

/// Probability of a partition of [n] (blocks listed with sorted members, in
/// order of least element) as the product of Chinese-restaurant seating
/// probabilities: join block of size c w.p. c/(i+theta), open w.p. theta/(i+theta).
inline double crp_chain_probability(const Blocks& blocks, int n, double theta) {
  std::vector<int> block_of(n + 1, -1);
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    for (int i : blocks[k]) block_of[i] = static_cast<int>(k);
  }
  std::map<int, int> counts;
  double p = 1.0;
  for (int i = 1; i <= n; ++i) {
    const int b = block_of[i];
    const double denom = (i - 1) + theta;
    auto it = counts.find(b);
    if (it == counts.end()) {
      p *= (i == 1) ? 1.0 : theta / denom;
      counts[b] = 1;
    } else {
      p *= it->second / denom;
      ++it->second;
    }
  }
  return p;
}

inline double poisson_pmf(int k, double mean) {
  return std::exp(k * std::log(mean) - mean - std::lgamma(k + 1.0));
}

/// log of prod_{j<m}(x + j a) by direct multiplication.
inline double rising_direct(double x, int m, double a) {
  double p = 1.0;
  for (int j = 0; j < m; ++j) p *= x + j * a;
  return std::log(p);
}

/// Normal / Normal-inverse-gamma marginal likelihood of a data set, computed
/// by integrating over mu analytically and over sigma^2 with the
/// inverse-gamma normalizer written out from scratch.
inline double nig_log_marginal(const std::vector<double>& x, double m0, double k0, double a0, double b0) {
  const double n = static_cast<double>(x.size());
  if (x.empty()) return 0.0;
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  const double kn = k0 + n;
  const double an = a0 + n / 2.0;
  const double bn = b0 + ss / 2.0 + k0 * n * (mean - m0) * (mean - m0) / (2.0 * kn);
  return std::lgamma(an) - std::lgamma(a0) + a0 * std::log(b0) - an * std::log(bn) +
         0.5 * (std::log(k0) - std::log(kn)) - (n / 2.0) * std::log(2.0 * M_PI);
}

}  // namespace oracle
