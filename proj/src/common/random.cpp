#include "photopuf/common/random.hpp"

#include <boost/random/normal_distribution.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <unordered_map>

#include "photopuf/common/errors.hpp"

namespace photopuf {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::initializer_list<std::uint64_t> words) {
  std::uint64_t h = 0x6A09E667F3BCC908ULL;
  for (auto w : words) h = splitmix64(h ^ splitmix64(w));
  return h;
}

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw InvalidArgument("Rng::below: bound must be positive");
  // Rejection on the top of the range keeps the draw unbiased.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % bound;
}

std::complex<double> Rng::complex_normal() {
  const double re = normal();
  const double im = normal();
  return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
}

std::vector<std::uint32_t> sample_without_replacement(Rng& rng, std::uint32_t population,
                                                      std::uint32_t count) {
  if (count > population) {
    throw InvalidArgument("cannot draw " + std::to_string(count) + " distinct values from " +
                          std::to_string(population));
  }
  // Sparse partial Fisher-Yates: only touched slots are materialized.
  std::unordered_map<std::uint32_t, std::uint32_t> swapped;
  auto at = [&](std::uint32_t i) {
    auto it = swapped.find(i);
    return it == swapped.end() ? i : it->second;
  };
  std::vector<std::uint32_t> out;
  out.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto j = static_cast<std::uint32_t>(i + rng.below(population - i));
    const std::uint32_t vi = at(i);
    const std::uint32_t vj = at(j);
    out.push_back(vj);
    swapped[j] = vi;
    swapped[i] = vj;
  }
  return out;
}

}  // namespace photopuf
