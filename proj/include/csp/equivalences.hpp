#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "csp/harness.hpp"

namespace csp {

/// Parameters for the named cross-representation checks. Negative n, reps
/// or tolerance select the pairing's default.
struct EquivalenceOptions {
  double theta = 1.0;
  double gamma = 1.0;
  double beta = 1.0;
  double beta_alt = 7.0;     // second scale for the beta-invariance pairing
  double threshold = 1e-4;   // gamma process truncation
  int n = -1;
  long reps = -1;
  int round = 2;             // IBP round for the stick-law pairings
  int urn_size = 2000;
  double tolerance = -1.0;
  std::uint64_t seed = 0;
  int threads = 0;
};

struct EquivalencePairing {
  std::string name;
  std::string description;
  std::string statistic;
  int default_n;
  long default_reps;
  double default_tolerance;
};

const std::vector<EquivalencePairing>& equivalence_pairings();

/// Throws std::invalid_argument for an unknown pairing name.
EquivalenceReport run_equivalence(const std::string& name, const EquivalenceOptions& options);

}  // namespace csp
