#pragma once

#include <cstdint>
#include <vector>

namespace photopuf::bch {

/// Smallest (by integer value) primitive polynomial of degree m over GF(2),
/// bit i holding the coefficient of x^i.
std::uint32_t least_primitive_polynomial(int m);

bool is_primitive_polynomial(std::uint32_t poly, int m);

/// GF(2^m) with log/antilog tables, 2 <= m <= 16.
class GaloisField {
 public:
  using Element = std::uint16_t;

  explicit GaloisField(int m);
  GaloisField(int m, std::uint32_t primitive_poly);

  int degree() const { return m_; }
  /// Multiplicative order 2^m - 1, also the BCH code length.
  int order() const { return n_; }
  std::uint32_t primitive_poly() const { return poly_; }

  /// alpha^e for any integer e (reduced mod the group order).
  Element exp(long long e) const {
    long long r = e % n_;
    if (r < 0) r += n_;
    return exp_[static_cast<std::size_t>(r)];
  }
  /// Discrete log of a nonzero element.
  int log(Element x) const { return log_[x]; }

  Element mul(Element a, Element b) const {
    if (a == 0 || b == 0) return 0;
    return exp_[static_cast<std::size_t>((log_[a] + log_[b]) % n_)];
  }
  Element div(Element a, Element b) const;
  Element inv(Element a) const { return div(1, a); }

 private:
  int m_;
  int n_;
  std::uint32_t poly_;
  std::vector<Element> exp_;
  std::vector<int> log_;
};

}  // namespace photopuf::bch
