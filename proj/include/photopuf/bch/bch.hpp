#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "photopuf/bch/galois.hpp"
#include "photopuf/common/bitkey.hpp"
#include "photopuf/common/bytes.hpp"

namespace photopuf::bch {

struct Decoded {
  BitKey message;
  BitKey codeword;
  std::size_t corrected = 0;
};

/// Narrow-sense binary BCH code of length 2^m - 1 and design distance 2t + 1.
///
/// Bit layout: index j of a codeword holds the coefficient of x^(n-1-j).
/// Encoding is systematic, the message occupies the first `message_length()`
/// positions and the parity (remainder mod g) the rest.
class BchCode {
 public:
  /// Builds the code for GF(2^m) with the least primitive polynomial.
  /// Requires 3 <= m <= 10 and 1 <= t < 2^(m-1); throws InvalidArgument when
  /// the generator leaves no message bits.
  static BchCode create(int m, int t);
  static BchCode create(int m, int t, std::uint32_t primitive_poly);

  int field_degree() const { return field_.degree(); }
  int length() const { return field_.order(); }
  int message_length() const { return ell_; }
  int t() const { return t_; }
  int design_distance() const { return 2 * t_ + 1; }
  std::uint32_t primitive_poly() const { return field_.primitive_poly(); }
  /// Generator coefficients, index i = coefficient of x^i.
  const std::vector<std::uint8_t>& generator() const { return generator_; }
  const GaloisField& field() const { return field_; }

  BitKey encode(const BitKey& message) const;

  /// Bounded-distance decoding (syndromes, Berlekamp-Massey, Chien search).
  /// Returns nullopt when the error pattern cannot be located within radius t.
  std::optional<Decoded> decode(const BitKey& received) const;

  /// S_1..S_2t of a received word; all zero iff the word is a codeword.
  std::vector<GaloisField::Element> syndromes(const BitKey& received) const;

  /// Error locator via Berlekamp-Massey; coefficient i multiplies x^i.
  std::vector<GaloisField::Element> error_locator(
      std::span<const GaloisField::Element> syndromes) const;

  /// Codeword indices located by a Chien search over the locator. Returns
  /// nullopt when the root count does not match the locator degree.
  std::optional<std::vector<std::size_t>> error_positions(
      std::span<const GaloisField::Element> locator) const;

  /// "PUFB" record: m u8, t u16, primitive poly u32, generator bitstring.
  Bytes serialize() const;
  static BchCode deserialize(std::span<const std::uint8_t> data);
  static BchCode read(ByteReader& reader);

 private:
  BchCode(GaloisField field, int t, std::vector<std::uint8_t> generator);

  GaloisField field_;
  int t_;
  int ell_;
  std::vector<std::uint8_t> generator_;
};

}  // namespace photopuf::bch
