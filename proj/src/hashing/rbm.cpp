#include "photopuf/common/errors.hpp"
#include "photopuf/common/random.hpp"
#include "photopuf/hashing/dft.hpp"
#include "photopuf/hashing/hashing.hpp"

namespace photopuf::hashing {

void RbmHelper::validate() const {
  const std::size_t n = dims.count();
  if (n == 0) throw InvalidArgument("RBM helper: empty dims");
  if (signs.size() != n) throw InvalidArgument("RBM helper: sign count != pixel count");
  for (auto s : signs)
    if (s != 1 && s != -1) throw InvalidArgument("RBM helper: sign not +-1");
  if (indices.empty() || indices.size() > n) throw InvalidArgument("RBM helper: bad M");
  for (auto i : indices)
    if (i >= n) throw InvalidArgument("RBM helper: index out of range");
}

RbmHelper make_rbm_helper(sim::Dims dims, std::size_t output_bits, std::uint64_t seed,
                          IndexDomain domain) {
  const std::size_t n = dims.count();
  if (n == 0) throw InvalidArgument("RBM: empty dims");
  if (output_bits == 0) throw InvalidArgument("RBM: M must be positive");
  const std::size_t population = domain == IndexDomain::full ? n : (n - 1) / 2;
  if (output_bits > population)
    throw InvalidArgument("RBM: M=" + std::to_string(output_bits) + " exceeds " +
                          std::to_string(population) + " available bins");

  RbmHelper h;
  h.dims = dims;
  Rng sign_rng(derive_seed({seed, 0x55}));
  h.signs.resize(n);
  for (auto& s : h.signs) s = sign_rng.bit() ? 1 : -1;
  Rng idx_rng(derive_seed({seed, 0x5E}));
  h.indices = sample_without_replacement(idx_rng, static_cast<std::uint32_t>(population),
                                         static_cast<std::uint32_t>(output_bits));
  if (domain == IndexDomain::half_spectrum)
    for (auto& i : h.indices) ++i;
  return h;
}

BitKey rbm_hash_standardized(std::span<const double> y, const RbmHelper& helper) {
  if (y.size() != helper.dims.count() || y.size() != helper.signs.size())
    throw InvalidArgument("RBM: response size does not match helper");
  std::vector<double> uy(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) uy[i] = helper.signs[i] * y[i];
  const auto half = real_dft_half(uy);
  const std::size_t n = y.size();

  std::vector<double> selected(helper.indices.size());
  double mean = 0.0;
  for (std::size_t i = 0; i < selected.size(); ++i) {
    const std::size_t k = helper.indices[i];
    if (k >= n) throw InvalidArgument("RBM: index out of range");
    selected[i] = k < half.size() ? half[k].real() : half[n - k].real();
    mean += selected[i];
  }
  mean /= static_cast<double>(selected.size());

  BitKey key(selected.size());
  for (std::size_t i = 0; i < selected.size(); ++i) key.set(i, selected[i] >= mean);
  return key;
}

BitKey rbm_hash(const sim::SpeckleImage& image, const RbmHelper& helper) {
  if (image.dims() != helper.dims) throw InvalidArgument("RBM: image dims do not match helper");
  return rbm_hash_standardized(standardize(image), helper);
}

std::pair<BitKey, RbmHelper> rbm_enroll(const sim::SpeckleImage& image, std::size_t output_bits,
                                        std::uint64_t seed) {
  auto y = standardize(image);
  auto helper = make_rbm_helper(image.dims(), output_bits, seed);
  auto key = rbm_hash_standardized(y, helper);
  return {std::move(key), std::move(helper)};
}

}  // namespace photopuf::hashing
