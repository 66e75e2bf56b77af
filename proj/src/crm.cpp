#include "csp/crm.hpp"

#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

namespace csp {

namespace {

// Draws labels for `count` atoms, resampling on repeats.
std::vector<Label> attach_labels(std::size_t count, const BaseDistribution& base, Rng& rng,
                                 int& collisions) {
  if (!base.sample) throw std::invalid_argument("BaseDistribution: no sampler");
  std::vector<Label> labels;
  labels.reserve(count);
  std::set<Label> seen;
  while (labels.size() < count) {
    const Label label = base.sample(rng);
    if (!seen.insert(label).second) {
      ++collisions;
      if (collisions > 1000 + static_cast<int>(count)) {
        throw std::runtime_error("attach_labels: base distribution keeps repeating labels; it is not continuous");
      }
      continue;
    }
    labels.push_back(label);
  }
  return labels;
}

}  // namespace

BaseDistribution BaseDistribution::uniform() {
  return {"uniform(0,1)", [](Rng& rng) { return csp::uniform(rng); }};
}

double AtomicMeasure::total_weight() const {
  double total = 0.0;
  for (const Atom& a : atoms) total += a.weight;
  return total;
}

Eigen::VectorXd AtomicMeasure::weights() const {
  Eigen::VectorXd w(static_cast<Eigen::Index>(atoms.size()));
  for (std::size_t k = 0; k < atoms.size(); ++k) w[static_cast<Eigen::Index>(k)] = atoms[k].weight;
  return w;
}

double AtomicMeasure::mass_in(Label lo, Label hi) const {
  double total = 0.0;
  for (const Atom& a : atoms) {
    if (a.label >= lo && a.label < hi) total += a.weight;
  }
  return total;
}

AtomicMeasure gamma_process(double theta, double beta, const BaseDistribution& base,
                            double threshold, Rng& rng) {
  const LevySpec spec = LevySpec::gamma(theta, beta);
  const JumpSet jumps = ferguson_klass_jumps(spec, JumpTruncation::above(threshold), rng);
  AtomicMeasure out;
  const std::vector<Label> labels = attach_labels(jumps.jumps.size(), base, rng, out.label_collisions);
  out.atoms.reserve(jumps.jumps.size());
  for (std::size_t k = 0; k < jumps.jumps.size(); ++k) out.atoms.push_back({jumps.jumps[k], labels[k], 0});
  out.truncation_threshold = jumps.truncation_threshold;
  out.omitted_mass_mean = jumps.omitted_mass_mean;
  return out;
}

AtomicMeasure dirichlet_process(const AtomicMeasure& gamma_measure) {
  if (gamma_measure.normalized) throw std::invalid_argument("dirichlet_process: input already normalized");
  const double total = gamma_measure.total_weight();
  if (!(total > 0.0)) throw std::invalid_argument("dirichlet_process: zero total mass");
  AtomicMeasure out = gamma_measure;
  for (Atom& a : out.atoms) a.weight /= total;
  out.normalized = true;
  return out;
}

AtomicMeasure beta_process(double gamma, double theta, const BaseDistribution& base, int n_rounds,
                           Rng& rng) {
  const BetaRounds rounds = beta_round_simulation(IbpParams(gamma, theta), n_rounds, rng);
  AtomicMeasure out;
  std::size_t count = 0;
  for (const auto& round : rounds.jumps_per_round) count += round.size();
  const std::vector<Label> labels = attach_labels(count, base, rng, out.label_collisions);
  std::size_t next = 0;
  for (std::size_t m = 0; m < rounds.jumps_per_round.size(); ++m) {
    for (double w : rounds.jumps_per_round[m]) {
      out.atoms.push_back({w, labels[next++], static_cast<int>(m) + 1});
    }
  }
  out.rounds = n_rounds;
  out.omitted_mass_mean = rounds.residual.selection_mass();
  return out;
}

LabelDraw dp_draw_labels(const AtomicMeasure& dp, int n, Rng& rng) {
  if (!dp.normalized) throw std::invalid_argument("dp_draw_labels: measure is not normalized");
  if (dp.atoms.empty()) throw std::invalid_argument("dp_draw_labels: no atoms");
  if (n < 1) throw std::domain_error("dp_draw_labels: n must be >= 1");
  const Eigen::VectorXd w = dp.weights();
  LabelDraw out;
  out.labels.reserve(n);
  for (int i = 0; i < n; ++i) out.labels.push_back(dp.atoms[categorical(w, rng)].label);
  out.partition = induced_partition(out.labels);
  return out;
}

FeatureDraw bernoulli_process_draw(const AtomicMeasure& bp, int n, Rng& rng) {
  if (n < 0) throw std::domain_error("bernoulli_process_draw: negative n");
  bool tagged = false;
  for (const Atom& a : bp.atoms) {
    if (!(a.weight > 0.0) || a.weight > 1.0) {
      throw std::domain_error("bernoulli_process_draw: weight outside (0,1]");
    }
    tagged = tagged || a.first_round > 0;
  }
  if ((tagged || bp.rounds > 0) && n > bp.rounds) {
    throw std::domain_error("bernoulli_process_draw: n exceeds the rounds simulated for this measure");
  }
  FeatureDraw out;
  out.label_sets.resize(n);
  for (int i = 1; i <= n; ++i) {
    auto& set = out.label_sets[i - 1];
    for (const Atom& a : bp.atoms) {
      if (a.first_round > 0) {
        if (i < a.first_round) continue;
        if (i == a.first_round) {
          set.push_back(a.label);
          continue;
        }
      }
      if (bernoulli(a.weight, rng)) set.push_back(a.label);
    }
  }
  out.allocation = induced_feature_allocation(out.label_sets);
  return out;
}

}  // namespace csp
