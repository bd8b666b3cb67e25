#include "photopuf/bch/bch.hpp"

#include <algorithm>
#include <set>
#include <utility>

#include "photopuf/common/errors.hpp"

namespace photopuf::bch {

namespace {

using Element = GaloisField::Element;
using Poly = std::vector<Element>;  // coefficient i multiplies x^i

Poly poly_mul(const GaloisField& gf, const Poly& a, const Poly& b) {
  Poly out(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] ^= gf.mul(a[i], b[j]);
  }
  return out;
}

/// Minimal polynomial of alpha^i: product of (x - alpha^j) over the
/// cyclotomic coset of i.
std::vector<std::uint8_t> minimal_polynomial(const GaloisField& gf, int i) {
  const int n = gf.order();
  std::set<int> coset;
  for (int j = i % n; coset.insert(j).second; j = (2 * j) % n) {
  }
  Poly p{1};
  for (int j : coset) p = poly_mul(gf, p, Poly{gf.exp(j), 1});
  std::vector<std::uint8_t> bin(p.size());
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p[k] > 1) throw NumericError("minimal polynomial has non-binary coefficient");
    bin[k] = static_cast<std::uint8_t>(p[k]);
  }
  return bin;
}

std::vector<std::uint8_t> binary_poly_mul(const std::vector<std::uint8_t>& a,
                                          const std::vector<std::uint8_t>& b) {
  std::vector<std::uint8_t> out(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i]) continue;
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] ^= b[j];
  }
  return out;
}

int cyclotomic_leader(int i, int n) {
  int lead = i;
  for (int j = (2 * i) % n; j != i; j = (2 * j) % n) lead = std::min(lead, j);
  return lead;
}

}  // namespace

BchCode::BchCode(GaloisField field, int t, std::vector<std::uint8_t> generator)
    : field_(std::move(field)),
      t_(t),
      ell_(field_.order() - static_cast<int>(generator.size() - 1)),
      generator_(std::move(generator)) {}

BchCode BchCode::create(int m, int t) {
  if (m < 3 || m > 10) throw InvalidArgument("BCH field degree m must be in [3, 10]");
  return create(m, t, least_primitive_polynomial(m));
}

BchCode BchCode::create(int m, int t, std::uint32_t primitive_poly) {
  if (m < 3 || m > 10) throw InvalidArgument("BCH field degree m must be in [3, 10]");
  if (t < 1 || t >= (1 << (m - 1))) {
    throw InvalidArgument("BCH correction capability t must be in [1, 2^(m-1))");
  }
  GaloisField gf(m, primitive_poly);
  const int n = gf.order();
  std::vector<std::uint8_t> g{1};
  std::set<int> used;
  for (int i = 1; i <= 2 * t - 1; i += 2) {
    const int lead = cyclotomic_leader(i % n, n);
    if (lead == 0 || !used.insert(lead).second) continue;
    g = binary_poly_mul(g, minimal_polynomial(gf, lead));
  }
  const int ell = n - static_cast<int>(g.size() - 1);
  if (ell <= 0) {
    throw InvalidArgument("BCH(m=" + std::to_string(m) + ", t=" + std::to_string(t) +
                          ") leaves no message bits");
  }
  return BchCode(std::move(gf), t, std::move(g));
}

BitKey BchCode::encode(const BitKey& message) const {
  if (static_cast<int>(message.size()) != ell_) {
    throw InvalidArgument("BCH encode: message must have " + std::to_string(ell_) +
                          " bits, got " + std::to_string(message.size()));
  }
  const int n = length();
  const int r = n - ell_;
  std::vector<std::uint8_t> reg(static_cast<std::size_t>(r), 0);
  for (int i = 0; i < ell_; ++i) {
    const std::uint8_t feedback = message[static_cast<std::size_t>(i)] ^ reg[r - 1];
    for (int j = r - 1; j > 0; --j) reg[j] = reg[j - 1] ^ (feedback & generator_[j]);
    reg[0] = feedback & generator_[0];
  }
  BitKey cw(static_cast<std::size_t>(n));
  for (int i = 0; i < ell_; ++i) cw.set(i, message[static_cast<std::size_t>(i)]);
  for (int j = 0; j < r; ++j) cw.set(static_cast<std::size_t>(ell_ + r - 1 - j), reg[j]);
  return cw;
}

std::vector<Element> BchCode::syndromes(const BitKey& received) const {
  const int n = length();
  if (static_cast<int>(received.size()) != n) {
    throw InvalidArgument("BCH: received word must have " + std::to_string(n) + " bits");
  }
  std::vector<Element> s(static_cast<std::size_t>(2 * t_ + 1), 0);  // s[0] unused
  for (int idx = 0; idx < n; ++idx) {
    if (!received[static_cast<std::size_t>(idx)]) continue;
    const long long deg = n - 1 - idx;
    for (int j = 1; j <= 2 * t_; j += 2) s[j] ^= field_.exp(deg * j);
  }
  for (int j = 2; j <= 2 * t_; j += 2) s[j] = field_.mul(s[j / 2], s[j / 2]);
  return {s.begin() + 1, s.end()};
}

std::vector<Element> BchCode::error_locator(std::span<const Element> syn) const {
  // Berlekamp-Massey over GF(2^m); syn[k] holds S_(k+1).
  std::vector<Element> c{1}, b{1};
  int len = 0;
  int shift = 1;
  Element last = 1;
  for (std::size_t k = 0; k < syn.size(); ++k) {
    Element d = syn[k];
    for (int i = 1; i <= len && static_cast<std::size_t>(i) < c.size(); ++i) {
      d ^= field_.mul(c[static_cast<std::size_t>(i)], syn[k - static_cast<std::size_t>(i)]);
    }
    if (d == 0) {
      ++shift;
      continue;
    }
    const Element coef = field_.div(d, last);
    std::vector<Element> next = c;
    if (next.size() < b.size() + static_cast<std::size_t>(shift)) {
      next.resize(b.size() + static_cast<std::size_t>(shift), 0);
    }
    for (std::size_t i = 0; i < b.size(); ++i) {
      next[i + static_cast<std::size_t>(shift)] ^= field_.mul(coef, b[i]);
    }
    if (2 * len <= static_cast<int>(k)) {
      b = c;
      len = static_cast<int>(k) + 1 - len;
      last = d;
      shift = 1;
    } else {
      ++shift;
    }
    c = std::move(next);
  }
  c.resize(static_cast<std::size_t>(len) + 1, 0);
  return c;
}

std::optional<std::vector<std::size_t>> BchCode::error_positions(
    std::span<const Element> locator) const {
  int degree = static_cast<int>(locator.size()) - 1;
  while (degree > 0 && locator[static_cast<std::size_t>(degree)] == 0) --degree;
  if (degree == 0) return std::vector<std::size_t>{};
  if (degree > t_) return std::nullopt;
  const int n = length();
  std::vector<int> logs(static_cast<std::size_t>(degree) + 1, -1);
  for (int i = 1; i <= degree; ++i) {
    if (locator[static_cast<std::size_t>(i)] != 0) {
      logs[static_cast<std::size_t>(i)] = field_.log(locator[static_cast<std::size_t>(i)]);
    }
  }
  std::vector<std::size_t> positions;
  // Error at polynomial degree `deg` iff locator(alpha^-deg) == 0.
  for (int deg = 0; deg < n; ++deg) {
    Element sum = locator[0];
    for (int i = 1; i <= degree; ++i) {
      if (logs[static_cast<std::size_t>(i)] < 0) continue;
      sum ^= field_.exp(static_cast<long long>(logs[static_cast<std::size_t>(i)]) -
                        static_cast<long long>(i) * deg);
    }
    if (sum == 0) positions.push_back(static_cast<std::size_t>(n - 1 - deg));
  }
  if (static_cast<int>(positions.size()) != degree) return std::nullopt;
  std::sort(positions.begin(), positions.end());
  return positions;
}

std::optional<Decoded> BchCode::decode(const BitKey& received) const {
  const auto syn = syndromes(received);
  Decoded out;
  out.codeword = received;
  if (std::any_of(syn.begin(), syn.end(), [](Element e) { return e != 0; })) {
    const auto locator = error_locator(syn);
    const auto positions = error_positions(locator);
    if (!positions) return std::nullopt;
    for (auto p : *positions) out.codeword.flip(p);
    out.corrected = positions->size();
    const auto check = syndromes(out.codeword);
    if (std::any_of(check.begin(), check.end(), [](Element e) { return e != 0; })) {
      return std::nullopt;
    }
  }
  std::vector<std::uint8_t> msg(out.codeword.bits().begin(),
                                out.codeword.bits().begin() + ell_);
  out.message = BitKey(std::move(msg));
  return out;
}

Bytes BchCode::serialize() const {
  ByteWriter w;
  w.raw(std::string_view("PUFB"));
  w.u8(static_cast<std::uint8_t>(field_degree()));
  w.u16le(static_cast<std::uint16_t>(t_));
  w.u32le(primitive_poly());
  w.u32le(static_cast<std::uint32_t>(generator_.size()));
  BitKey g(generator_);
  w.raw(g.packed());
  return std::move(w).bytes();
}

BchCode BchCode::read(ByteReader& r) {
  r.expect_magic("PUFB");
  const int m = r.u8();
  const int t = r.u16le();
  const std::uint32_t poly = r.u32le();
  const std::uint32_t glen = r.u32le();
  if (glen == 0 || glen > 1024) {
    throw FormatError(FormatError::Kind::malformed, "BCH record: bad generator length");
  }
  const auto packed = r.raw((glen + 7) / 8);
  const BitKey g = BitKey::from_packed(packed, glen);
  BchCode code = [&] {
    try {
      return create(m, t, poly);
    } catch (const InvalidArgument& e) {
      throw FormatError(FormatError::Kind::malformed, std::string("BCH record: ") + e.what());
    }
  }();
  if (!std::equal(code.generator_.begin(), code.generator_.end(), g.bits().begin(),
                  g.bits().end())) {
    throw FormatError(FormatError::Kind::malformed,
                      "BCH record: generator does not match (m, t, polynomial)");
  }
  return code;
}

BchCode BchCode::deserialize(std::span<const std::uint8_t> data) {
  ByteReader r(data);
  return read(r);
}

}  // namespace photopuf::bch
