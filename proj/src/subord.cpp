#include "csp/subord.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/expint.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

namespace csp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kInnerTol = 1e-13;

// Abscissa tables are built once per thread; the two-argument tanh_sinh
// overload is not const in this Boost release.
boost::math::quadrature::tanh_sinh<double>& tanh_sinh_rule() {
  thread_local boost::math::quadrature::tanh_sinh<double> rule;
  return rule;
}

boost::math::quadrature::exp_sinh<double>& exp_sinh_rule() {
  thread_local boost::math::quadrature::exp_sinh<double> rule;
  return rule;
}

void require_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw std::domain_error(std::string("LevySpec: ") + what + " must be positive and finite");
  }
}

// Ein(z) = int_0^z (1 - e^{-t}) / t dt.
double ein(double z) {
  if (z < 1.0) {
    double term = z;
    double sum = z;
    for (int k = 2; k < 40; ++k) {
      term *= -z / k;
      const double add = term / k;
      sum += add;
      if (std::fabs(add) < 1e-17 * std::fabs(sum)) break;
    }
    return sum;
  }
  return boost::math::expint(1, z) + std::log(z) + std::numbers::egamma;
}

// ((1 - w)^{theta - 1} - 1) / w, with one_minus_w passed to keep precision near w = 1.
double beta_excess(double w, double one_minus_w, double theta) {
  if (w < 0.5) return std::expm1((theta - 1.0) * std::log1p(-w)) / w;
  return (std::pow(one_minus_w, theta - 1.0) - 1.0) / w;
}

double beta_laplace(const BetaLevy& b, double lambda, double* error) {
  const double mass = b.gamma * b.theta;
  double remainder = 0.0;
  double err = 0.0;
  if (b.theta != 1.0 && lambda > 0.0) {
    auto f = [&](double w, double wc) {
      const double one_minus_w = wc > 0.0 ? wc : 1.0 - w;
      return -std::expm1(-lambda * w) * beta_excess(w, one_minus_w, b.theta);
    };
    remainder = tanh_sinh_rule().integrate(f, 0.0, 1.0, kInnerTol, &err);
  }
  if (error) *error = mass * err;
  return lambda == 0.0 ? 0.0 : mass * (ein(lambda) + remainder);
}

// int_0^1 w^{n-1} e^{-lambda w} (1 - w)^{theta - 1} dw.
double beta_moment(const BetaLevy& b, int order, double lambda, double* error) {
  double err = 0.0;
  double value = 0.0;
  const double power = order - 1.0;
  if (lambda <= 1.0) {
    auto f = [&](double w, double wc) {
      const double one_minus_w = wc > 0.0 ? wc : 1.0 - w;
      return std::pow(w, power) * std::exp(-lambda * w) * std::pow(one_minus_w, b.theta - 1.0);
    };
    value = tanh_sinh_rule().integrate(f, 0.0, 1.0, kInnerTol, &err);
  } else {
    // t = lambda w; integrand in t is negligible beyond t = 745.
    const double upper = std::min(lambda, 745.0);
    auto f = [&](double t, double tc) {
      const double gap = (tc > 0.0 && upper == lambda) ? tc : lambda - t;
      return std::pow(t, power) * std::exp(-t) * std::pow(gap / lambda, b.theta - 1.0);
    };
    const double scale = std::pow(lambda, -static_cast<double>(order));
    value = scale * tanh_sinh_rule().integrate(f, 0.0, upper, kInnerTol, &err);
    err *= scale;
  }
  if (error) *error = err;
  return value;
}

// log |Phi^{(n)}(lambda)|.
double log_abs_derivative(const LevySpec& spec, int order, double lambda) {
  if (const auto* g = std::get_if<GammaLevy>(&spec.density)) {
    const double jump_part =
        std::lgamma(static_cast<double>(order)) + std::log(g->theta) - order * std::log(lambda + g->beta);
    if (order == 1 && spec.drift > 0.0) return std::log(spec.drift + std::exp(jump_part));
    return jump_part;
  }
  const auto& b = std::get<BetaLevy>(spec.density);
  double moment = beta_moment(b, order, lambda, nullptr);
  moment *= b.gamma * b.theta;
  if (order == 1) moment += spec.drift;
  return std::log(moment);
}

}  // namespace

// ---------------------------------------------------------------------------
// Levy specifications

LevySpec LevySpec::gamma(double theta, double beta, double drift) {
  require_positive(theta, "theta");
  require_positive(beta, "beta");
  if (!(drift >= 0.0)) throw std::domain_error("LevySpec: drift must be nonnegative");
  return LevySpec{drift, GammaLevy{theta, beta}};
}

LevySpec LevySpec::beta(double gamma, double theta, double drift) {
  require_positive(gamma, "gamma");
  require_positive(theta, "theta");
  if (!(drift >= 0.0)) throw std::domain_error("LevySpec: drift must be nonnegative");
  return LevySpec{drift, BetaLevy{gamma, theta}};
}

double levy_density(const LevySpec& spec, double w) {
  if (!(w > 0.0)) return 0.0;
  if (const auto* g = std::get_if<GammaLevy>(&spec.density)) {
    return g->theta * std::exp(-g->beta * w) / w;
  }
  const auto& b = std::get<BetaLevy>(spec.density);
  if (w >= 1.0) return 0.0;
  return b.gamma * b.theta * std::pow(1.0 - w, b.theta - 1.0) / w;
}

double levy_tail(const LevySpec& spec, double x) {
  if (!(x > 0.0)) return kInf;
  if (const auto* g = std::get_if<GammaLevy>(&spec.density)) {
    return g->theta * boost::math::expint(1, g->beta * x);
  }
  const auto& b = std::get<BetaLevy>(spec.density);
  if (x >= 1.0) return 0.0;
  double remainder = 0.0;
  if (b.theta != 1.0) {
    auto f = [&](double w, double wc) {
      const double one_minus_w = wc > 0.0 ? wc : 1.0 - w;
      return beta_excess(w, one_minus_w, b.theta);
    };
    remainder = tanh_sinh_rule().integrate(f, x, 1.0, kInnerTol);
  }
  return b.gamma * b.theta * (-std::log(x) + remainder);
}

double levy_tail_inverse(const LevySpec& spec, double y) {
  if (!(y > 0.0) || !std::isfinite(y)) {
    throw std::domain_error("levy_tail_inverse: target must be positive and finite");
  }
  if (y > levy_tail(spec, std::numeric_limits<double>::min())) {
    throw std::range_error("levy_tail_inverse: solution is below the smallest normal double");
  }
  // Solve in v = log x, where T(e^v) is smooth and strictly decreasing.
  auto g = [&](double v) { return levy_tail(spec, std::exp(v)) - y; };
  auto fdf = [&](double v) {
    const double x = std::exp(v);
    return std::make_pair(levy_tail(spec, x) - y, -levy_density(spec, x) * x);
  };

  double guess;
  double hi_limit;
  if (const auto* gl = std::get_if<GammaLevy>(&spec.density)) {
    const double r = y / gl->theta;
    guess = r > 1.0 ? -r - std::numbers::egamma - std::log(gl->beta)
                    : std::log(std::max(-std::log(r), 1e-3) / gl->beta);
    hi_limit = 700.0;
  } else {
    const auto& b = std::get<BetaLevy>(spec.density);
    guess = std::min(-y / (b.gamma * b.theta), -1e-8);
    hi_limit = 0.0;
  }

  double lo = guess - 1.0;
  double hi = std::min(guess + 1.0, hi_limit);
  for (int i = 0; g(lo) < 0.0; ++i) {
    lo -= std::ldexp(1.0, i);
    if (lo < -745.0) throw std::runtime_error("levy_tail_inverse: could not bracket the root from below");
  }
  for (int i = 0; g(hi) > 0.0; ++i) {
    if (hi >= hi_limit) throw std::runtime_error("levy_tail_inverse: could not bracket the root from above");
    hi = std::min(hi + std::ldexp(1.0, i), hi_limit);
  }
  guess = std::clamp(guess, lo, hi);
  std::uintmax_t iterations = 200;
  const double v = boost::math::tools::newton_raphson_iterate(fdf, guess, lo, hi, 44, iterations);
  return std::exp(v);
}

double levy_mean_below(const LevySpec& spec, double x) {
  if (!(x > 0.0)) return 0.0;
  if (const auto* g = std::get_if<GammaLevy>(&spec.density)) {
    return -g->theta * std::expm1(-g->beta * x) / g->beta;
  }
  const auto& b = std::get<BetaLevy>(spec.density);
  if (x >= 1.0) return b.gamma;
  return -b.gamma * std::expm1(b.theta * std::log1p(-x));
}

double levy_mean_total(const LevySpec& spec) {
  if (const auto* g = std::get_if<GammaLevy>(&spec.density)) return g->theta / g->beta;
  return std::get<BetaLevy>(spec.density).gamma;
}

// ---------------------------------------------------------------------------
// Laplace exponent

double laplace_exponent(const LevySpec& spec, double lambda) {
  if (!(lambda >= 0.0)) throw std::domain_error("laplace_exponent: lambda must be >= 0");
  if (const auto* g = std::get_if<GammaLevy>(&spec.density)) {
    return spec.drift * lambda + g->theta * std::log1p(lambda / g->beta);
  }
  return spec.drift * lambda + beta_laplace(std::get<BetaLevy>(spec.density), lambda, nullptr);
}

QuadratureValue laplace_exponent_quadrature(const LevySpec& spec, double lambda) {
  if (!(lambda >= 0.0)) throw std::domain_error("laplace_exponent: lambda must be >= 0");
  QuadratureValue out;
  if (lambda == 0.0) return out;
  if (const auto* g = std::get_if<GammaLevy>(&spec.density)) {
    auto f = [&](double w) {
      if (w == 0.0) return g->theta * lambda;
      return -std::expm1(-lambda * w) * g->theta * std::exp(-g->beta * w) / w;
    };
    out.value = exp_sinh_rule().integrate(f, 0.0, kInf, 1e-12, &out.error_bound);
  } else {
    const auto& b = std::get<BetaLevy>(spec.density);
    auto f = [&](double w, double wc) {
      const double one_minus_w = wc > 0.0 ? wc : 1.0 - w;
      return -std::expm1(-lambda * w) / w * std::pow(one_minus_w, b.theta - 1.0);
    };
    out.value = b.gamma * b.theta *
                tanh_sinh_rule().integrate(f, 0.0, 1.0, 1e-12, &out.error_bound);
    out.error_bound *= b.gamma * b.theta;
  }
  out.value += spec.drift * lambda;
  return out;
}

double laplace_exponent_derivative(const LevySpec& spec, int order, double lambda) {
  if (order < 1) throw std::domain_error("laplace_exponent_derivative: order must be >= 1");
  if (!(lambda >= 0.0)) throw std::domain_error("laplace_exponent_derivative: lambda must be >= 0");
  const double sign = (order % 2 == 1) ? 1.0 : -1.0;
  double jump_part;
  if (const auto* g = std::get_if<GammaLevy>(&spec.density)) {
    jump_part = std::exp(std::lgamma(static_cast<double>(order)) - order * std::log(lambda + g->beta)) *
                g->theta;
  } else {
    const auto& b = std::get<BetaLevy>(spec.density);
    jump_part = b.gamma * b.theta * beta_moment(b, order, lambda, nullptr);
  }
  return sign * jump_part + (order == 1 ? spec.drift : 0.0);
}

QuadratureValue laplace_exponent_derivative_quadrature(const LevySpec& spec, int order,
                                                       double lambda) {
  if (order < 1) throw std::domain_error("laplace_exponent_derivative: order must be >= 1");
  if (!(lambda >= 0.0)) throw std::domain_error("laplace_exponent_derivative: lambda must be >= 0");
  const double sign = (order % 2 == 1) ? 1.0 : -1.0;
  QuadratureValue out;
  if (const auto* g = std::get_if<GammaLevy>(&spec.density)) {
    auto f = [&](double w) {
      if (w == 0.0) return order == 1 ? g->theta : 0.0;
      return std::exp((order - 1.0) * std::log(w) - (lambda + g->beta) * w) * g->theta;
    };
    out.value = exp_sinh_rule().integrate(f, 0.0, kInf, 1e-12, &out.error_bound);
  } else {
    const auto& b = std::get<BetaLevy>(spec.density);
    auto f = [&](double w, double wc) {
      const double one_minus_w = wc > 0.0 ? wc : 1.0 - w;
      return std::pow(w, order - 1.0) * std::exp(-lambda * w) * std::pow(one_minus_w, b.theta - 1.0);
    };
    out.value = b.gamma * b.theta *
                tanh_sinh_rule().integrate(f, 0.0, 1.0, 1e-12, &out.error_bound);
    out.error_bound *= b.gamma * b.theta;
  }
  out.value = sign * out.value + (order == 1 ? spec.drift : 0.0);
  return out;
}

// ---------------------------------------------------------------------------
// EPPF from the Laplace exponent

EppfQuadrature eppf_from_laplace(const LevySpec& spec, std::span<const int> block_sizes, double tol) {
  if (block_sizes.empty()) throw std::domain_error("eppf_from_laplace: empty size list");
  if (spec.drift != 0.0) {
    throw std::domain_error("eppf_from_laplace: normalized-jump partitions require zero drift");
  }
  if (!(tol > 0.0)) throw std::domain_error("eppf_from_laplace: tol must be positive");
  int n = 0;
  for (int size : block_sizes) {
    if (size < 1) throw std::domain_error("eppf_from_laplace: block sizes must be >= 1");
    n += size;
  }
  // Distinct sizes, so each derivative is evaluated once per abscissa.
  std::vector<std::pair<int, int>> orders;
  for (int size : block_sizes) {
    auto it = std::find_if(orders.begin(), orders.end(), [&](const auto& p) { return p.first == size; });
    if (it == orders.end()) {
      orders.emplace_back(size, 1);
    } else {
      ++it->second;
    }
  }

  const double scale = spec.is_gamma() ? std::get<GammaLevy>(spec.density).beta : 1.0;
  const double log_scale = std::log(scale);

  // Log of the integrand with respect to u, lambda = scale e^u.
  auto log_integrand = [&](double u) {
    const double log_lambda = log_scale + u;
    const double lambda = std::exp(log_lambda);
    if (lambda == 0.0 || !std::isfinite(lambda)) return -kInf;
    double h = n * log_lambda - laplace_exponent(spec, lambda);
    for (const auto& [order, count] : orders) h += count * log_abs_derivative(spec, order, lambda);
    return std::isnan(h) ? -kInf : h;
  };

  const auto mode = boost::math::tools::brent_find_minima(
      [&](double u) { return -log_integrand(u); }, -40.0, 60.0, 40);
  const double u_star = mode.first;
  const double h_star = -mode.second;
  if (!std::isfinite(h_star)) {
    throw std::runtime_error("eppf_from_laplace: integrand is not finite at its mode");
  }

  auto integrand = [&](double u) { return std::exp(log_integrand(u) - h_star); };
  double left_error = 0.0;
  double right_error = 0.0;
  double left = 0.0;
  double right = 0.0;
  try {
    left = exp_sinh_rule().integrate(integrand, -kInf, u_star, tol, &left_error);
    right = exp_sinh_rule().integrate(integrand, u_star, kInf, tol, &right_error);
  } catch (const std::exception& e) {
    throw std::runtime_error(
        std::string("eppf_from_laplace: quadrature failed (the formula requires Phi(lambda) -> inf, "
                    "i.e. infinite Levy mass, and a finite integral): ") + e.what());
  }
  const double total = left + right;
  if (!std::isfinite(total) || !(total > 0.0)) {
    throw std::runtime_error(
        "eppf_from_laplace: integral diverged; the formula requires Phi(lambda) -> inf as "
        "lambda -> inf so that the normalized jumps are well defined");
  }

  EppfQuadrature out;
  out.value.log_prob = h_star + std::log(total) - std::lgamma(static_cast<double>(n));
  out.error_bound = (left_error + right_error) / total;
  if (!spec.is_gamma()) out.error_bound += (1.0 + static_cast<double>(block_sizes.size())) * kInnerTol;
  return out;
}

// ---------------------------------------------------------------------------
// Jumps

JumpTruncation JumpTruncation::above(double threshold) {
  if (!(threshold > 0.0)) throw std::domain_error("JumpTruncation: threshold must be positive");
  return {Mode::threshold, threshold, 0};
}

JumpTruncation JumpTruncation::largest(int count) {
  if (count < 1) throw std::domain_error("JumpTruncation: count must be >= 1");
  return {Mode::count, 0.0, count};
}

JumpSet ferguson_klass_jumps(const LevySpec& spec, const JumpTruncation& truncation, Rng& rng) {
  JumpSet out;
  out.drift = spec.drift;
  double arrival = 0.0;
  if (truncation.mode == JumpTruncation::Mode::threshold) {
    const double stop = levy_tail(spec, truncation.threshold);
    for (;;) {
      arrival += exponential(rng);
      if (arrival >= stop && !out.jumps.empty()) break;
      out.jumps.push_back(levy_tail_inverse(spec, arrival));
      if (arrival >= stop) break;
    }
    out.truncation_threshold = std::min(truncation.threshold, out.jumps.back());
  } else {
    for (int k = 0; k < truncation.count; ++k) {
      arrival += exponential(rng);
      out.jumps.push_back(levy_tail_inverse(spec, arrival));
    }
    out.truncation_threshold = out.jumps.back();
  }
  out.omitted_mass_mean = levy_mean_below(spec, out.truncation_threshold);
  return out;
}

std::vector<double> thin_poisson(std::span<const double> points,
                                 const std::function<double(double)>& keep_prob, Rng& rng) {
  std::vector<double> kept;
  for (double x : points) {
    const double h = keep_prob(x);
    if (!(h >= 0.0 && h <= 1.0)) throw std::domain_error("thin_poisson: keep probability outside [0,1]");
    if (uniform(rng) < h) kept.push_back(x);
  }
  return kept;
}

double BetaResidual::density(double w) const {
  if (!(w > 0.0) || w >= 1.0) return 0.0;
  return gamma * theta * std::pow(1.0 - w, theta + rounds - 1.0) / w;
}

double BetaResidual::selection_mass() const { return gamma * theta / (theta + rounds); }

double BetaResidual::sample_selected(Rng& rng) const {
  // w * density(w) is proportional to the Beta(1, theta + rounds) density;
  // drawn here as a ratio of gamma variates.
  const double x = exponential(rng);
  const double y = gamma_variate(theta + rounds, rng);
  return x / (x + y);
}

BetaRounds beta_round_simulation(const IbpParams& params, int n_rounds, Rng& rng) {
  if (n_rounds < 1) throw std::domain_error("beta_round_simulation: n_rounds must be >= 1");
  BetaRounds out;
  BetaResidual residual{params.gamma, params.theta, 0};
  for (int m = 1; m <= n_rounds; ++m) {
    const int count = poisson_variate(residual.selection_mass(), rng);
    std::vector<double> round;
    round.reserve(count);
    for (int j = 0; j < count; ++j) round.push_back(residual.sample_selected(rng));
    out.jumps_per_round.push_back(std::move(round));
    residual = residual.after_round();
  }
  out.residual = residual;
  return out;
}

AppearanceDraw normalized_jumps_by_appearance(const JumpSet& jumps, int n, Rng& rng) {
  if (jumps.drift != 0.0) {
    throw std::domain_error("normalized_jumps_by_appearance: nonzero drift is not supported");
  }
  if (jumps.jumps.empty()) throw std::invalid_argument("normalized_jumps_by_appearance: empty jump set");
  if (n < 0) throw std::domain_error("normalized_jumps_by_appearance: negative n");
  const Eigen::Map<const Eigen::VectorXd> w(jumps.jumps.data(),
                                            static_cast<Eigen::Index>(jumps.jumps.size()));
  const double total = w.sum();
  if (!(total > 0.0)) throw std::invalid_argument("normalized_jumps_by_appearance: zero total mass");

  AppearanceDraw out;
  out.atoms.resize(n);
  std::vector<double> seen_weights;
  std::vector<int> first_seen(jumps.jumps.size(), -1);
  for (int i = 0; i < n; ++i) {
    const int atom = categorical(w, rng);
    out.atoms[i] = atom;
    if (first_seen[atom] < 0) {
      first_seen[atom] = static_cast<int>(seen_weights.size());
      seen_weights.push_back(jumps.jumps[atom] / total);
    }
  }
  out.partition = induced_partition(out.atoms);
  out.sticks.kind = StickKind::partition;
  out.sticks.weights = Eigen::Map<const Eigen::VectorXd>(seen_weights.data(),
                                                         static_cast<Eigen::Index>(seen_weights.size()));
  out.sticks.truncation = static_cast<int>(seen_weights.size());
  out.sticks.tail_mass_bound = std::max(0.0, 1.0 - out.sticks.weights.sum());
  return out;
}

}  // namespace csp
