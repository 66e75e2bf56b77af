#pragma once

#include <array>
#include <cstdint>
#include <limits>

#include <Eigen/Core>

namespace csp {

/// Philox4x32-10 counter-based generator.
///
/// The key is the 64-bit seed; the 128-bit counter is split into a 64-bit
/// stream id (high words) and a 64-bit block index (low words). Every call
/// to operator() consumes two 32-bit words of the current block, so a stream
/// yields 2^65 draws before wrapping. Two generators with the same
/// (seed, stream) pair produce identical sequences on every platform.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0, std::uint64_t stream = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  /// A generator on a different stream under the same seed.
  Rng split(std::uint64_t stream) const { return Rng(seed_, stream); }

  /// Raw Philox4x32-10 block function, exposed for known-answer tests.
  static std::array<std::uint32_t, 4> philox(std::array<std::uint32_t, 4> counter,
                                             std::array<std::uint32_t, 2> key);

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int cursor_ = 4;
};

// Variates. Each documents how many raw draws it consumes, so that other
// implementations can reproduce a stream exactly.

/// Uniform on [0,1): top 53 bits of one draw.
double uniform(Rng& rng);

/// Uniform on (0,1): (top 53 bits + 0.5) * 2^-53, one draw.
double uniform_open(Rng& rng);

/// Exp(1) by inversion: -log(uniform_open).
double exponential(Rng& rng);

/// Standard normal by Box-Muller, two uniform_open draws, cosine branch only.
double normal(Rng& rng);

/// Gamma(shape, 1) by Marsaglia-Tsang; shape < 1 uses the u^(1/shape) boost.
double gamma_variate(double shape, Rng& rng);

/// Beta(a, b). The a == 1 case uses inversion 1 - u^(1/b) (one draw);
/// otherwise X / (X + Y) with X ~ Gamma(a), Y ~ Gamma(b).
double beta_variate(double a, double b, Rng& rng);

/// Poisson(mean): sequential inversion for mean < 10, PTRS (Hormann) above.
int poisson_variate(double mean, Rng& rng);

/// One uniform draw compared against p.
bool bernoulli(double p, Rng& rng);

/// Inverse-CDF draw over unnormalized nonnegative weights, scanning in index
/// order. One draw. Returns the selected index.
int categorical(const Eigen::Ref<const Eigen::VectorXd>& weights, Rng& rng);

}  // namespace csp
