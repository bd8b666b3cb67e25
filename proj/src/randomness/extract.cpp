#include "photopuf/common/errors.hpp"
#include "photopuf/common/random.hpp"
#include "photopuf/hashing/hashing.hpp"
#include "photopuf/randomness/randomness.hpp"

namespace photopuf::randomness {

std::size_t bits_per_helper(sim::Dims dims) {
  const auto n = dims.count();
  return n < 3 ? 0 : (n - 1) / 2;
}

BitStream extract_bits(std::span<const sim::SpeckleImage> images, const ExtractConfig& cfg) {
  if (cfg.bits_per_image == 0) throw InvalidArgument("extract: bits_per_image must be positive");
  BitStream out;
  out.reserve(images.size() * cfg.bits_per_image);
  for (std::size_t j = 0; j < images.size(); ++j) {
    const auto& img = images[j];
    const std::size_t cap = bits_per_helper(img.dims());
    if (cap == 0) throw InvalidArgument("extract: image too small");
    const auto y = hashing::standardize(img);
    std::size_t remaining = cfg.bits_per_image;
    for (std::uint64_t h = 0; remaining > 0; ++h) {
      const std::size_t take = std::min(remaining, cap);
      const auto helper = hashing::make_rbm_helper(img.dims(), take, derive_seed({cfg.seed, j, h}),
                                                   hashing::IndexDomain::half_spectrum);
      const auto key = hashing::rbm_hash_standardized(y, helper);
      out.insert(out.end(), key.bits().begin(), key.bits().end());
      remaining -= take;
    }
  }
  return out;
}

}  // namespace photopuf::randomness
