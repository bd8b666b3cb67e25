#pragma once

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>
#include <vector>

namespace photopuf {

/// Mixes a list of words into one 64-bit seed (splitmix64 finalizer chain).
/// Used to derive independent sub-streams from (seed, kind, dims, index) tuples.
std::uint64_t derive_seed(std::initializer_list<std::uint64_t> words);

/// Seeded generator with platform-independent derived distributions.
///
/// 64-bit Mersenne Twister (Boost's implementation, same sequence as
/// std::mt19937_64 but faster here). The <random> distributions are
/// implementation-defined, so the uniform transforms are written out and
/// normals come from Boost's ziggurat sampler.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1].
  double uniform_open0() { return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53; }

  /// Unbiased integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);

  bool bit() { return (engine_() >> 63) != 0; }

  /// Standard normal draw.
  double normal() { return boost::random::normal_distribution<double>()(engine_); }

  /// Circular complex Gaussian with E|z|^2 = 1.
  std::complex<double> complex_normal();

 private:
  boost::random::mt19937_64 engine_;
};

/// Draws `count` distinct values from [0, population) in draw order.
std::vector<std::uint32_t> sample_without_replacement(Rng& rng, std::uint32_t population,
                                                      std::uint32_t count);

}  // namespace photopuf
