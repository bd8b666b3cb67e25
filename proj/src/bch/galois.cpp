#include "photopuf/bch/galois.hpp"

#include "photopuf/common/errors.hpp"

namespace photopuf::bch {

bool is_primitive_polynomial(std::uint32_t poly, int m) {
  if (m < 2 || m > 16) return false;
  if (((poly >> m) & 1) == 0 || (poly >> (m + 1)) != 0 || (poly & 1) == 0) return false;
  const std::uint32_t n = (1U << m) - 1;
  std::uint32_t x = 1;
  for (std::uint32_t k = 1; k <= n; ++k) {
    x <<= 1;
    if (x & (1U << m)) x ^= poly;
    if (x == 1) return k == n;
  }
  return false;
}

std::uint32_t least_primitive_polynomial(int m) {
  if (m < 2 || m > 16) throw InvalidArgument("field degree must be in [2, 16]");
  for (std::uint32_t p = (1U << m) | 1U; p < (1U << (m + 1)); p += 2) {
    if (is_primitive_polynomial(p, m)) return p;
  }
  throw NumericError("no primitive polynomial found");  // unreachable for valid m
}

GaloisField::GaloisField(int m) : GaloisField(m, least_primitive_polynomial(m)) {}

GaloisField::GaloisField(int m, std::uint32_t primitive_poly)
    : m_(m), n_((1 << m) - 1), poly_(primitive_poly) {
  if (!is_primitive_polynomial(primitive_poly, m)) {
    throw InvalidArgument("polynomial is not primitive for the requested degree");
  }
  exp_.resize(static_cast<std::size_t>(n_));
  log_.assign(static_cast<std::size_t>(n_ + 1), -1);
  std::uint32_t x = 1;
  for (int i = 0; i < n_; ++i) {
    exp_[static_cast<std::size_t>(i)] = static_cast<Element>(x);
    log_[x] = i;
    x <<= 1;
    if (x & (1U << m)) x ^= poly_;
  }
}

GaloisField::Element GaloisField::div(Element a, Element b) const {
  if (b == 0) throw NumericError("GF division by zero");
  if (a == 0) return 0;
  int e = log_[a] - log_[b];
  if (e < 0) e += n_;
  return exp_[static_cast<std::size_t>(e)];
}

}  // namespace photopuf::bch
