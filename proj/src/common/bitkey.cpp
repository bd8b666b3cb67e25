#include "photopuf/common/bitkey.hpp"

#include <algorithm>
#include <numeric>

#include "photopuf/common/errors.hpp"

namespace photopuf {

BitKey::BitKey(std::size_t length) : bits_(length, 0) {}

BitKey::BitKey(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  for (auto& b : bits_) {
    if (b > 1) throw InvalidArgument("BitKey entries must be 0 or 1");
  }
}

BitKey BitKey::from_string(std::string_view s) {
  std::vector<std::uint8_t> bits;
  bits.reserve(s.size());
  for (char c : s) {
    if (c != '0' && c != '1') throw InvalidArgument("bit string may only contain 0 and 1");
    bits.push_back(c == '1' ? 1 : 0);
  }
  return BitKey(std::move(bits));
}

BitKey BitKey::from_packed(std::span<const std::uint8_t> packed, std::size_t length) {
  if (packed.size() * 8 < length) throw InvalidArgument("packed buffer shorter than bit length");
  BitKey key(length);
  for (std::size_t i = 0; i < length; ++i) {
    key.bits_[i] = (packed[i / 8] >> (7 - i % 8)) & 1;
  }
  return key;
}

Bytes BitKey::packed() const {
  Bytes out((bits_.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    if (bits_[i]) out[i / 8] |= static_cast<std::uint8_t>(0x80 >> (i % 8));
  }
  return out;
}

std::string BitKey::to_string() const {
  std::string s(bits_.size(), '0');
  for (std::size_t i = 0; i < bits_.size(); ++i) s[i] = bits_[i] ? '1' : '0';
  return s;
}

std::size_t BitKey::popcount() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1));
}

BitKey BitKey::operator^(const BitKey& other) const {
  BitKey out = *this;
  out ^= other;
  return out;
}

BitKey& BitKey::operator^=(const BitKey& other) {
  if (other.size() != size()) throw InvalidArgument("BitKey xor: length mismatch");
  for (std::size_t i = 0; i < bits_.size(); ++i) bits_[i] ^= other.bits_[i];
  return *this;
}

std::size_t hamming_distance(const BitKey& a, const BitKey& b) {
  if (a.size() != b.size()) {
    throw InvalidArgument("hamming distance: lengths differ (" + std::to_string(a.size()) +
                          " vs " + std::to_string(b.size()) + ")");
  }
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i];
  return d;
}

double fractional_hamming(const BitKey& a, const BitKey& b) {
  if (a.empty()) throw InvalidArgument("fractional hamming of empty keys");
  return static_cast<double>(hamming_distance(a, b)) / static_cast<double>(a.size());
}

BitKey frame_key(const BitKey& key, std::size_t width) {
  if (width < key.size()) throw InvalidArgument("frame width shorter than key");
  std::vector<std::uint8_t> bits(key.bits().begin(), key.bits().end());
  bits.resize(width, 0);
  return BitKey(std::move(bits));
}

}  // namespace photopuf
