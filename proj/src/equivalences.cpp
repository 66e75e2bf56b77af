#include "csp/equivalences.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>
#include <stdexcept>

#include "csp/crm.hpp"
#include "csp/epf.hpp"
#include "csp/sticks.hpp"
#include "csp/subord.hpp"

namespace csp {

const std::vector<EquivalencePairing>& equivalence_pairings() {
  static const std::vector<EquivalencePairing> pairings = {
      {"self", "CRP against itself (noise floor)", "tvd", 4, 100000, 0.01},
      {"crp-gem", "CRP vs paintbox over GEM sticks", "tvd", 4, 100000, 0.02},
      {"crp-gamma", "CRP vs labels drawn from a normalized gamma process", "tvd", 4, 100000, 0.03},
      {"gamma-scale", "normalized gamma process partitions at two scales", "tvd", 4, 100000, 0.02},
      {"gamma-v1", "first appearance-ordered normalized gamma jump vs Beta(1, theta)", "ks", 1, 10000, 0.02},
      {"ibp-sticks", "IBP vs Bernoulli draws on IBP sticks, block-size profiles", "tvd", 3, 100000, 0.02},
      {"ibp-beta-process", "IBP vs Bernoulli process on a beta process, block-size profiles", "tvd", 3, 100000,
       0.02},
      {"ibp-rounds", "IBP sticks first used in a given round vs Beta(1, theta + round - 1)", "ks", 1, 100000,
       0.02},
      {"beta-rounds", "beta process jumps selected in a given round vs Beta(1, theta + round - 1)", "ks", 1,
       100000, 0.02},
      {"polya-urn", "table-1 share of a large urn vs Beta(1, theta)", "ks", 1, 10000, 0.02},
  };
  return pairings;
}

namespace {

std::string num(double x) {
  std::ostringstream out;
  out << x;
  return out.str();
}

EquivalenceReport ks_from_lists(const std::string& name, const std::function<std::vector<double>(Rng&)>& sampler,
                                const std::string& reference, double b, long reps, const EquivalenceOptions& o,
                                double tolerance) {
  const auto start = std::chrono::steady_clock::now();
  std::vector<std::vector<double>> lists(static_cast<std::size_t>(reps));
  run_replicates({o.seed, 3, reps, o.threads},
                 [&](long r, Rng& rng) { lists[static_cast<std::size_t>(r)] = sampler(rng); });
  std::vector<double> all;
  for (const auto& l : lists) all.insert(all.end(), l.begin(), l.end());
  EquivalenceReport report;
  report.name = name + " vs " + reference;
  report.sampler_a = name;
  report.sampler_b = reference;
  report.statistic = "ks";
  report.reps_a = static_cast<long>(all.size());
  report.tolerance = tolerance;
  report.distance = ks_distance(std::move(all), [b](double x) { return beta1_cdf(b, x); });
  report.passed = report.distance <= tolerance;
  report.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace

EquivalenceReport run_equivalence(const std::string& name, const EquivalenceOptions& o) {
  const auto& all = equivalence_pairings();
  const auto it = std::find_if(all.begin(), all.end(), [&](const auto& p) { return p.name == name; });
  if (it == all.end()) throw std::invalid_argument("unknown equivalence pairing '" + name + "'");
  const int n = o.n > 0 ? o.n : it->default_n;
  const long reps = o.reps > 0 ? o.reps : it->default_reps;
  const double tol = o.tolerance > 0.0 ? o.tolerance : it->default_tolerance;
  const CrpParams crp(o.theta);
  const IbpParams ibp(o.gamma, o.theta);

  KeySampler crp_key = [&](Rng& rng) { return format(crp_sample(crp, n, rng)); };
  auto dp_key = [&](double beta) {
    return KeySampler([&, beta](Rng& rng) {
      const AtomicMeasure dp =
          dirichlet_process(gamma_process(o.theta, beta, BaseDistribution::uniform(), o.threshold, rng));
      return format(dp_draw_labels(dp, n, rng).partition);
    });
  };

  if (name == "self") return tvd_equivalence("crp", crp_key, "crp", crp_key, reps, o.seed, tol, o.threads);
  if (name == "crp-gem") {
    KeySampler gem = [&](Rng& rng) {
      const StickWeights sticks = gem_sticks_to_tolerance(GemParams(o.theta), kDefaultTailTolerance, rng);
      return format(paintbox_partition(sticks, n, rng));
    };
    return tvd_equivalence("crp", crp_key, "gem-paintbox", gem, reps, o.seed, tol, o.threads);
  }
  if (name == "crp-gamma") {
    return tvd_equivalence("crp", crp_key, "normalized-gamma", dp_key(o.beta), reps, o.seed, tol, o.threads);
  }
  if (name == "gamma-scale") {
    return tvd_equivalence("normalized-gamma(beta=" + num(o.beta) + ")", dp_key(o.beta),
                           "normalized-gamma(beta=" + num(o.beta_alt) + ")", dp_key(o.beta_alt), reps,
                           o.seed, tol, o.threads);
  }
  if (name == "gamma-v1") {
    const LevySpec spec = LevySpec::gamma(o.theta, o.beta);
    ScalarSampler v1 = [&](Rng& rng) {
      const JumpSet jumps = ferguson_klass_jumps(spec, JumpTruncation::above(o.threshold), rng);
      return normalized_jumps_by_appearance(jumps, 1, rng).sticks.weights[0];
    };
    return ks_equivalence("normalized-gamma-v1", v1, "beta(1,theta)",
                          [&](double x) { return beta1_cdf(o.theta, x); }, reps, o.seed, tol, o.threads);
  }
  if (name == "ibp-sticks") {
    KeySampler ibp_key = [&](Rng& rng) { return size_profile_key(ibp_sample(ibp, n, rng)); };
    KeySampler sticks_key = [&](Rng& rng) {
      return size_profile_key(bernoulli_featurize(ibp_sticks(ibp, n, rng), n, rng));
    };
    return tvd_equivalence("ibp", ibp_key, "ibp-sticks", sticks_key, reps, o.seed, tol, o.threads);
  }
  if (name == "ibp-beta-process") {
    KeySampler ibp_key = [&](Rng& rng) { return size_profile_key(ibp_sample(ibp, n, rng)); };
    KeySampler bp_key = [&](Rng& rng) {
      const AtomicMeasure bp = beta_process(o.gamma, o.theta, BaseDistribution::uniform(), n, rng);
      return size_profile_key(bernoulli_process_draw(bp, n, rng).allocation);
    };
    return tvd_equivalence("ibp", ibp_key, "bernoulli-process", bp_key, reps, o.seed, tol, o.threads);
  }
  if (name == "ibp-rounds" || name == "beta-rounds") {
    if (o.round < 1) throw std::domain_error("round must be >= 1");
    const double b = o.theta + o.round - 1.0;
    std::function<std::vector<double>(Rng&)> sampler;
    if (name == "ibp-rounds") {
      sampler = [&](Rng& rng) {
        const StickWeights sticks = ibp_sticks(ibp, o.round, rng);
        std::vector<double> out;
        for (std::size_t j = 0; j < sticks.first_round.size(); ++j) {
          if (sticks.first_round[j] == o.round) out.push_back(sticks.weights[static_cast<Eigen::Index>(j)]);
        }
        return out;
      };
    } else {
      sampler = [&](Rng& rng) { return beta_round_simulation(ibp, o.round, rng).jumps_per_round.back(); };
    }
    return ks_from_lists(name + "(round=" + std::to_string(o.round) + ")", sampler, "beta(1,theta+round-1)", b,
                         reps, o, tol);
  }
  // polya-urn
  if (o.urn_size < 1) throw std::domain_error("urn_size must be >= 1");
  ScalarSampler share = [&](Rng& rng) {
    return crp_table_counts(crp, o.urn_size, rng).front() / static_cast<double>(o.urn_size);
  };
  return ks_equivalence("urn-table-1-share", share, "beta(1,theta)", [&](double x) { return beta1_cdf(o.theta, x); },
                        reps, o.seed, tol, o.threads);
}

}  // namespace csp
