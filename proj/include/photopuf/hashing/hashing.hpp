#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "photopuf/common/bitkey.hpp"
#include "photopuf/common/bytes.hpp"
#include "photopuf/sim/types.hpp"

namespace photopuf::hashing {

/// Zero-mean, unit population-variance copy of the image, row-major.
/// Throws DegenerateInput for a constant image.
std::vector<double> standardize(const sim::SpeckleImage& image);
std::vector<double> standardize(std::span<const double> values);

// ---------------------------------------------------------------------------
// Random binary method: bits = threshold(Re(S F U y)) at the mean of the
// selected real parts. U is a random +-1 diagonal, F the unnormalized DFT,
// S a selection of M distinct indices.

struct RbmHelper {
  sim::Dims dims;
  std::vector<std::int8_t> signs;      // U diagonal, one per pixel
  std::vector<std::uint32_t> indices;  // S, M distinct DFT bins

  std::size_t output_bits() const { return indices.size(); }
  void validate() const;
  bool operator==(const RbmHelper&) const = default;
};

enum class IndexDomain {
  /// Any DFT bin in [0, N).
  full,
  /// Bins 1 .. (N-1)/2 only, so no two selected real parts are conjugate
  /// copies of each other.
  half_spectrum,
};

RbmHelper make_rbm_helper(sim::Dims dims, std::size_t output_bits, std::uint64_t seed,
                          IndexDomain domain = IndexDomain::full);

std::pair<BitKey, RbmHelper> rbm_enroll(const sim::SpeckleImage& image, std::size_t output_bits,
                                        std::uint64_t seed);
BitKey rbm_hash(const sim::SpeckleImage& image, const RbmHelper& helper);
/// Hash of an already standardized, flattened response.
BitKey rbm_hash_standardized(std::span<const double> y, const RbmHelper& helper);

// ---------------------------------------------------------------------------
// Two-stage block SVD hash.

struct BlockOrigin {
  std::uint32_t row = 0;
  std::uint32_t col = 0;
  bool operator==(const BlockOrigin&) const = default;
};

struct SvdHelper {
  sim::Dims dims;
  std::uint32_t k1 = 32;
  std::uint32_t k2 = 16;
  std::vector<BlockOrigin> stage1;  // p blocks in the image
  std::vector<BlockOrigin> stage2;  // r blocks in the k1 x 2p intermediate image
  std::vector<std::uint32_t> indices;

  std::size_t output_bits() const { return indices.size(); }
  std::size_t raw_length() const { return 2 * stage2.size() * k2; }
  void validate() const;
  bool operator==(const SvdHelper&) const = default;
};

struct SvdShape {
  std::uint32_t k1 = 32;
  std::uint32_t k2 = 16;
  std::uint32_t p = 64;
  std::uint32_t r = 32;
};

SvdHelper make_svd_helper(sim::Dims dims, std::size_t output_bits, SvdShape shape,
                          std::uint64_t seed);

std::pair<BitKey, SvdHelper> svd_enroll(const sim::SpeckleImage& image, std::size_t output_bits,
                                        SvdShape shape, std::uint64_t seed);
BitKey svd_hash(const sim::SpeckleImage& image, const SvdHelper& helper);

/// Pre-quantization vector h = [u_1..u_r, v_1..v_r] of the second stage.
std::vector<double> svd_raw_hash(std::span<const double> standardized, const SvdHelper& helper);

/// bit_i = 0 if h_i < h_{(i+1) mod n}, else 1.
std::vector<std::uint8_t> quantize_against_right_neighbor(std::span<const double> h);

struct SingularPair {
  double sigma = 0.0;
  std::vector<double> u;
  std::vector<double> v;
};

/// Leading singular triplet of a row-major block, with both vectors
/// sign-normalized. Throws NumericError on non-finite output.
SingularPair first_singular_pair(std::span<const double> block, std::size_t rows,
                                 std::size_t cols);

/// Flips the vector so that its largest-magnitude entry (first one on ties)
/// is positive.
void normalize_sign(std::span<double> v);

// ---------------------------------------------------------------------------

using HashHelper = std::variant<RbmHelper, SvdHelper>;

struct HashConfig {
  enum class Algorithm : std::uint8_t { rbm = 0, svd = 1 };

  Algorithm algorithm = Algorithm::rbm;
  std::size_t output_bits = 255;
  SvdShape svd;
  std::uint64_t seed = 0;
};

std::pair<BitKey, HashHelper> hash_enroll(const sim::SpeckleImage& image, const HashConfig& cfg);
BitKey hash_with(const sim::SpeckleImage& image, const HashHelper& helper);
std::size_t output_bits(const HashHelper& helper);
sim::Dims helper_dims(const HashHelper& helper);

/// "PUFH" helper file: version u16, algo u8 (0 = RBM, 1 = SVD), M u32, rows
/// u32, cols u32, then RBM: N packed sign bits (1 = +1) and M u32 indices;
/// SVD: k1, k2, p, r u32, p + r origin pairs (row, col) u32, M u32 indices.
/// Little-endian.
Bytes encode_helper(const HashHelper& helper);
HashHelper decode_helper(std::span<const std::uint8_t> data);
HashHelper read_helper(ByteReader& reader);

}  // namespace photopuf::hashing
