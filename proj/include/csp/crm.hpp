#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "csp/alloc.hpp"
#include "csp/epf.hpp"
#include "csp/random.hpp"
#include "csp/sticks.hpp"
#include "csp/subord.hpp"

namespace csp {

/// Labels are points of the base space; the shipped bases are on the real line.
using Label = double;

struct Atom {
  double weight = 0.0;
  Label label = 0.0;
  int first_round = 0;  // beta process round-built atoms only, else 0
};

/// A continuous label distribution. Continuity is a contract; collisions
/// are detected and resampled when labels are attached.
struct BaseDistribution {
  std::string name;
  std::function<Label(Rng&)> sample;

  /// Uniform on [0, 1).
  static BaseDistribution uniform();
};

/// Finite list of weighted, labeled atoms approximating a CRM draw.
struct AtomicMeasure {
  std::vector<Atom> atoms;
  bool normalized = false;
  double truncation_threshold = 0.0;  // gamma process: atoms below were dropped
  double omitted_mass_mean = 0.0;     // expected weight of the dropped atoms
  int rounds = 0;                     // beta process: rounds simulated
  int label_collisions = 0;           // labels resampled because of a repeat

  double total_weight() const;
  Eigen::VectorXd weights() const;
  /// mu([lo, hi)).
  double mass_in(Label lo, Label hi) const;
};

/// Gamma process with Levy density theta w^{-1} e^{-beta w}: jumps above
/// `threshold` by Ferguson-Klass, labels i.i.d. from base. Unnormalized.
AtomicMeasure gamma_process(double theta, double beta, const BaseDistribution& base,
                            double threshold, Rng& rng);

/// Weights divided by their sum. Throws std::invalid_argument for an already
/// normalized or zero-mass input.
AtomicMeasure dirichlet_process(const AtomicMeasure& gamma_measure);

/// Beta process atoms selected in rounds 1..n_rounds, exact for feature
/// allocations of [n_rounds]. Atoms carry the round that first selected them.
AtomicMeasure beta_process(double gamma, double theta, const BaseDistribution& base, int n_rounds,
                           Rng& rng);

struct LabelDraw {
  std::vector<Label> labels;
  Partition partition;
};

/// n i.i.d. labels from a normalized measure and their induced partition.
/// Throws std::invalid_argument if the measure is not normalized.
LabelDraw dp_draw_labels(const AtomicMeasure& dp, int n, Rng& rng);

struct FeatureDraw {
  std::vector<std::vector<Label>> label_sets;
  FeatureAllocation allocation;
};

/// Bernoulli process: index i includes atom k with probability weight_k.
/// Round-built atoms are included at their first round by construction and
/// excluded before it, so n may not exceed the rounds simulated. Throws
/// std::domain_error for a weight outside (0,1].
FeatureDraw bernoulli_process_draw(const AtomicMeasure& bp, int n, Rng& rng);

}  // namespace csp
