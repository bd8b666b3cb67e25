#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "photopuf/common/bytes.hpp"

namespace photopuf {

/// Fixed-length binary string. Used for hashes, codewords, code offsets and
/// output keys. Length is set at construction and never changes.
class BitKey {
 public:
  BitKey() = default;
  explicit BitKey(std::size_t length);
  explicit BitKey(std::vector<std::uint8_t> bits);

  static BitKey from_string(std::string_view zeros_and_ones);
  /// MSB-first unpacking of `length` bits from `packed`.
  static BitKey from_packed(std::span<const std::uint8_t> packed, std::size_t length);

  std::size_t size() const { return bits_.size(); }
  bool empty() const { return bits_.empty(); }

  std::uint8_t operator[](std::size_t i) const { return bits_[i]; }
  void set(std::size_t i, bool value) { bits_[i] = value ? 1 : 0; }
  void flip(std::size_t i) { bits_[i] ^= 1; }

  std::span<const std::uint8_t> bits() const { return bits_; }

  /// MSB-first packing, zero-padded to a whole byte.
  Bytes packed() const;
  std::string to_string() const;
  std::size_t popcount() const;

  BitKey operator^(const BitKey& other) const;
  BitKey& operator^=(const BitKey& other);
  bool operator==(const BitKey& other) const = default;

 private:
  std::vector<std::uint8_t> bits_;
};

/// Number of differing positions. Throws InvalidArgument on length mismatch.
std::size_t hamming_distance(const BitKey& a, const BitKey& b);

/// Hamming distance divided by the key length.
double fractional_hamming(const BitKey& a, const BitKey& b);

/// Appends zero bits up to `width`; used for the 511+1 -> 512-bit key framing.
BitKey frame_key(const BitKey& key, std::size_t width);

}  // namespace photopuf
