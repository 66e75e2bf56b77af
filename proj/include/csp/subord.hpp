#pragma once

#include <functional>
#include <span>
#include <variant>
#include <vector>

#include "csp/alloc.hpp"
#include "csp/epf.hpp"
#include "csp/random.hpp"
#include "csp/sticks.hpp"

namespace csp {

/// Gamma process Levy density theta w^{-1} exp(-beta w) on (0, inf).
struct GammaLevy {
  double theta = 1.0;
  double beta = 1.0;
};

/// Beta process Levy density gamma theta w^{-1} (1 - w)^{theta - 1} on (0, 1).
struct BetaLevy {
  double gamma = 1.0;
  double theta = 1.0;
};

/// A subordinator: drift plus a Levy density from one of the supported
/// families. Both families satisfy the integrability condition
/// int min(1, w) rho(dw) < inf for positive parameters.
struct LevySpec {
  double drift = 0.0;
  std::variant<GammaLevy, BetaLevy> density;

  static LevySpec gamma(double theta, double beta, double drift = 0.0);
  static LevySpec beta(double gamma, double theta, double drift = 0.0);

  bool is_gamma() const { return std::holds_alternative<GammaLevy>(density); }
};

struct QuadratureValue {
  double value = 0.0;
  double error_bound = 0.0;  // absolute
};

/// rho(w).
double levy_density(const LevySpec& spec, double w);

/// Tail mass T(x) = rho((x, inf)).
double levy_tail(const LevySpec& spec, double x);

/// Solves T(x) = y for x, to about 1e-12 relative accuracy. Throws
/// std::range_error when x would be below the smallest normal double.
double levy_tail_inverse(const LevySpec& spec, double y);

/// int_0^x w rho(dw): mean total size of jumps at most x.
double levy_mean_below(const LevySpec& spec, double x);

/// int_0^inf w rho(dw): mean total size of all jumps (excluding drift).
double levy_mean_total(const LevySpec& spec);

/// Laplace exponent Phi(lambda) = c lambda + int (1 - e^{-lambda w}) rho(dw).
/// Closed form for the gamma family, quadrature otherwise.
double laplace_exponent(const LevySpec& spec, double lambda);

/// Phi by direct quadrature of the Levy-Khinchin integral, for any family.
QuadratureValue laplace_exponent_quadrature(const LevySpec& spec, double lambda);

/// n-th derivative of Phi,
///   Phi^{(n)}(lambda) = c [n == 1] + (-1)^{n-1} int w^n e^{-lambda w} rho(dw).
/// Closed form (-1)^{n-1} (n-1)! theta / (lambda + beta)^n for the gamma family.
double laplace_exponent_derivative(const LevySpec& spec, int order, double lambda);

/// Derivative by direct quadrature, for any family.
QuadratureValue laplace_exponent_derivative_quadrature(const LevySpec& spec, int order,
                                                       double lambda);

struct EppfQuadrature {
  EpfValue value;
  double error_bound = 0.0;  // estimated absolute error of value.log_prob
};

/// EPPF of the partition induced by i.i.d. draws from the normalized jumps of
/// a driftless subordinator:
///   (-1)^{N-K} / (N-1)! int_0^inf lambda^{N-1} e^{-Phi(lambda)}
///       prod_k Phi^{(N_k)}(lambda) dlambda.
/// Integrated over u = log(lambda / scale) in log space, split at the mode of
/// the integrand. Throws std::domain_error for bad sizes or nonzero drift and
/// std::runtime_error if the integral fails to converge.
EppfQuadrature eppf_from_laplace(const LevySpec& spec, std::span<const int> block_sizes,
                                 double tol = 1e-10);

/// Jumps of a subordinator on the unit time interval, largest first.
struct JumpSet {
  std::vector<double> jumps;           // strictly descending
  double truncation_threshold = 0.0;   // omitted jumps are below this
  double omitted_mass_mean = 0.0;      // int_0^threshold w rho(dw)
  double drift = 0.0;
};

/// Stop rule for Ferguson-Klass simulation: all jumps above a threshold, or
/// the largest `count` jumps.
struct JumpTruncation {
  enum class Mode { threshold, count };
  Mode mode = Mode::threshold;
  double threshold = 1e-4;
  int count = 0;

  static JumpTruncation above(double threshold);
  static JumpTruncation largest(int count);
};

/// Ferguson-Klass: xi_k = T^{-1}(Gamma_k) for unit-rate Poisson arrival
/// times Gamma_k. In count mode the reported threshold is the smallest kept
/// jump. Threshold mode always keeps the largest jump, even when it falls
/// below the threshold (the threshold then drops to that jump), so the set is
/// never empty.
JumpSet ferguson_klass_jumps(const LevySpec& spec, const JumpTruncation& truncation, Rng& rng);

/// Keeps each point independently with probability keep_prob(point).
/// Throws std::domain_error if keep_prob leaves [0,1].
std::vector<double> thin_poisson(std::span<const double> points,
                                 const std::function<double(double)>& keep_prob, Rng& rng);

/// Beta process Levy intensity left after `rounds` rounds of Bernoulli
/// thinning: gamma theta w^{-1} (1 - w)^{theta + rounds - 1} dw.
struct BetaResidual {
  double gamma = 1.0;
  double theta = 1.0;
  int rounds = 0;

  double density(double w) const;
  /// Total mass of w * density(w): the Poisson mean of next round's jumps.
  double selection_mass() const;
  /// One draw from the normalized w * density(w), a Beta(1, theta + rounds)
  /// law, generated as a ratio of gamma variates.
  double sample_selected(Rng& rng) const;
  BetaResidual after_round() const { return {gamma, theta, rounds + 1}; }
};

struct BetaRounds {
  std::vector<std::vector<double>> jumps_per_round;
  BetaResidual residual;
};

/// Exact round-by-round simulation of the beta process jumps first selected
/// by index m = 1..n_rounds, by Poisson thinning of the residual intensity.
BetaRounds beta_round_simulation(const IbpParams& params, int n_rounds, Rng& rng);

struct AppearanceDraw {
  StickWeights sticks;       // normalized weights of atoms seen, appearance order
  Partition partition;
  std::vector<int> atoms;    // atom (index into jumps) chosen by each draw
};

/// Normalizes the jumps, draws n i.i.d. atoms and returns the induced
/// partition with the weights in order of first appearance. Throws
/// std::invalid_argument for an empty or zero-mass jump set and
/// std::domain_error for nonzero drift.
AppearanceDraw normalized_jumps_by_appearance(const JumpSet& jumps, int n, Rng& rng);

}  // namespace csp
