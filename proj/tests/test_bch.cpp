#include <set>

#include "doctest.h"
#include "photopuf/bch/bch.hpp"
#include "photopuf/common/errors.hpp"
#include "photopuf/common/random.hpp"

using namespace photopuf;
using photopuf::bch::BchCode;

namespace {

// Independent reference arithmetic: carry-less products reduced by the field
// polynomial, no log tables.
struct RefField {
  int m;
  std::uint32_t poly;

  std::uint32_t mul(std::uint32_t a, std::uint32_t b) const {
    std::uint32_t r = 0;
    while (b) {
      if (b & 1) r ^= a;
      b >>= 1;
      a <<= 1;
      if (a & (1U << m)) a ^= poly;
    }
    return r;
  }
  std::uint32_t pow_x(long long e) const {
    std::uint32_t r = 1;
    for (long long i = 0; i < e; ++i) r = mul(r, 2);
    return r;
  }
};

// Order of x modulo poly, brute force.
bool ref_primitive(std::uint32_t poly, int m) {
  if (!(poly & 1) || !(poly & (1U << m))) return false;
  RefField f{m, poly};
  std::uint32_t v = 1;
  const std::uint32_t n = (1U << m) - 1;
  for (std::uint32_t k = 1; k <= n; ++k) {
    v = f.mul(v, 2);
    if (v == 1) return k == n;
  }
  return false;
}

std::uint32_t ref_least_primitive(int m) {
  for (std::uint32_t p = (1U << m) | 1; p < (1U << (m + 1)); p += 2)
    if (ref_primitive(p, m)) return p;
  return 0;
}

using Poly = std::vector<std::uint32_t>;  // field coefficients, index = power

Poly ref_mul(const RefField& f, const Poly& a, const Poly& b) {
  Poly r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] ^= f.mul(a[i], b[j]);
  return r;
}

// Generator as the product of (x - alpha^j) over the union of the cyclotomic
// cosets of 1, 3, ..., 2t-1.
std::vector<std::uint8_t> ref_generator(int m, int t) {
  RefField f{m, ref_least_primitive(m)};
  const int n = (1 << m) - 1;
  std::set<int> roots;
  for (int i = 1; i <= 2 * t - 1; i += 2) {
    int j = i % n;
    do {
      roots.insert(j);
      j = (2 * j) % n;
    } while (j != i % n);
  }
  Poly g{1};
  for (int r : roots) g = ref_mul(f, g, Poly{f.pow_x(r), 1});
  std::vector<std::uint8_t> out;
  for (auto c : g) {
    REQUIRE(c <= 1);
    out.push_back(static_cast<std::uint8_t>(c));
  }
  return out;
}

// Remainder of a binary polynomial (index = power) modulo g.
std::vector<std::uint8_t> ref_mod(std::vector<std::uint8_t> a, const std::vector<std::uint8_t>& g) {
  const std::size_t dg = g.size() - 1;
  for (std::size_t i = a.size(); i-- > dg;) {
    if (!a[i]) continue;
    for (std::size_t j = 0; j <= dg; ++j) a[i - dg + j] ^= g[j];
  }
  a.resize(dg);
  return a;
}

// Codeword index j holds the coefficient of x^(n-1-j).
std::vector<std::uint8_t> as_poly(const BitKey& c) {
  std::vector<std::uint8_t> p(c.size());
  for (std::size_t j = 0; j < c.size(); ++j) p[c.size() - 1 - j] = c[j];
  return p;
}

BitKey random_bits(Rng& r, std::size_t n) {
  BitKey k(n);
  for (std::size_t i = 0; i < n; ++i) k.set(i, r.bit());
  return k;
}

BitKey index_bits(std::size_t value, std::size_t n) {
  BitKey k(n);
  for (std::size_t i = 0; i < n; ++i) k.set(i, (value >> i) & 1);
  return k;
}

template <typename F>
void for_each_pattern(int n, int max_weight, F&& f) {
  std::vector<int> idx;
  auto rec = [&](auto&& self, int start) -> void {
    f(idx);
    if (static_cast<int>(idx.size()) == max_weight) return;
    for (int i = start; i < n; ++i) {
      idx.push_back(i);
      self(self, i + 1);
      idx.pop_back();
    }
  };
  rec(rec, 0);
}

}  // namespace

TEST_CASE("least primitive polynomials match brute force") {
  for (int m = 3; m <= 10; ++m) {
    CAPTURE(m);
    CHECK(bch::least_primitive_polynomial(m) == ref_least_primitive(m));
  }
  CHECK(ref_least_primitive(4) == 0b10011);
  CHECK(ref_least_primitive(8) == 0x11D);
}

TEST_CASE("field arithmetic agrees with reference") {
  for (int m : {3, 5, 8}) {
    bch::GaloisField gf(m);
    RefField ref{m, gf.primitive_poly()};
    const int q = 1 << m;
    for (int a = 0; a < q; a += (m == 8 ? 7 : 1))
      for (int b = 0; b < q; b += (m == 8 ? 5 : 1))
        CHECK(gf.mul(static_cast<bch::GaloisField::Element>(a), static_cast<bch::GaloisField::Element>(b)) ==
              ref.mul(static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)));
    for (int a = 1; a < q; ++a) {
      const auto e = static_cast<bch::GaloisField::Element>(a);
      CHECK(gf.mul(e, gf.inv(e)) == 1);
      CHECK(gf.exp(gf.log(e)) == e);
    }
  }
}

TEST_CASE("generator polynomial matches minimal-polynomial construction") {
  for (int m = 3; m <= 9; ++m) {
    for (int t : {1, 2, 3, 5, 7}) {
      if (t >= (1 << (m - 1))) continue;
      CAPTURE(m);
      CAPTURE(t);
      const auto ref = ref_generator(m, t);
      const int ell = (1 << m) - 1 - static_cast<int>(ref.size() - 1);
      if (ell <= 0) {
        CHECK_THROWS_AS(BchCode::create(m, t), InvalidArgument);
        continue;
      }
      const auto code = BchCode::create(m, t);
      CHECK(code.generator() == ref);
      CHECK(code.message_length() == ell);
      // g divides x^n - 1.
      const auto n = static_cast<std::size_t>(code.length());
      std::vector<std::uint8_t> xn1(n + 1, 0);
      xn1[0] = 1;
      xn1[n] = 1;
      const auto rem = ref_mod(xn1, ref);
      CHECK(std::all_of(rem.begin(), rem.end(), [](auto b) { return b == 0; }));
    }
  }
}

TEST_CASE("small code parameters") {
  const auto h = BchCode::create(4, 1);
  CHECK(h.length() == 15);
  CHECK(h.message_length() == 11);
  CHECK(h.generator().size() - 1 == 4);

  const auto c = BchCode::create(4, 3);
  CHECK(c.length() == 15);
  CHECK(c.message_length() == 5);
  CHECK(c.design_distance() == 7);
  CHECK(c.t() == (c.design_distance() - 1) / 2);

  const auto big = BchCode::create(8, 31);
  CHECK(big.length() == 255);
  CHECK(big.message_length() == static_cast<int>(255 - (ref_generator(8, 31).size() - 1)));
  CHECK(big.message_length() > 0);

  CHECK_THROWS_AS(BchCode::create(2, 1), InvalidArgument);
  CHECK_THROWS_AS(BchCode::create(11, 1), InvalidArgument);
  CHECK_THROWS_AS(BchCode::create(4, 0), InvalidArgument);
  CHECK_THROWS_AS(BchCode::create(4, 8), InvalidArgument);
  CHECK(BchCode::create(4, 7).message_length() == 1);  // repetition code
}

TEST_CASE("message length is non-increasing in t for m = 8") {
  int prev = 255;
  for (int t = 1; t < 128; ++t) {
    int ell = 0;
    try {
      ell = BchCode::create(8, t).message_length();
    } catch (const InvalidArgument&) {
      ell = 0;
    }
    CAPTURE(t);
    CHECK(ell <= prev);
    prev = ell;
  }
}

TEST_CASE("encoding is systematic, linear and lands in the code") {
  Rng r(11);
  for (auto [m, t] : {std::pair{4, 2}, {5, 3}, {8, 31}, {9, 51}}) {
    const auto code = BchCode::create(m, t);
    const auto ell = static_cast<std::size_t>(code.message_length());
    const auto n = static_cast<std::size_t>(code.length());
    CHECK(code.encode(BitKey(ell)) == BitKey(n));
    for (int k = 0; k < 20; ++k) {
      const auto a = random_bits(r, ell);
      const auto b = random_bits(r, ell);
      const auto ca = code.encode(a);
      CHECK(ca.size() == n);
      for (std::size_t i = 0; i < ell; ++i) CHECK(ca[i] == a[i]);
      CHECK((ca ^ code.encode(b)) == code.encode(a ^ b));
      const auto rem = ref_mod(as_poly(ca), code.generator());
      CHECK(std::all_of(rem.begin(), rem.end(), [](auto x) { return x == 0; }));
      for (auto s : code.syndromes(ca)) CHECK(s == 0);
    }
  }
  CHECK_THROWS_AS(BchCode::create(4, 3).encode(BitKey(4)), InvalidArgument);
}

TEST_CASE("BCH(15,5) minimum distance is 7") {
  const auto code = BchCode::create(4, 3);
  std::vector<BitKey> words;
  for (std::size_t v = 0; v < 32; ++v) words.push_back(code.encode(index_bits(v, 5)));
  std::size_t dmin = 15;
  for (std::size_t i = 0; i < words.size(); ++i)
    for (std::size_t j = i + 1; j < words.size(); ++j)
      dmin = std::min(dmin, hamming_distance(words[i], words[j]));
  CHECK(dmin == 7);
}

TEST_CASE("BCH(15,5) decodes every error pattern up to weight 3 on every codeword") {
  const auto code = BchCode::create(4, 3);
  std::size_t cases = 0, failures = 0;
  for (std::size_t v = 0; v < 32; ++v) {
    const auto msg = index_bits(v, 5);
    const auto cw = code.encode(msg);
    for_each_pattern(15, 3, [&](const std::vector<int>& idx) {
      BitKey rx = cw;
      for (int i : idx) rx.flip(static_cast<std::size_t>(i));
      const auto d = code.decode(rx);
      ++cases;
      if (!d || d->message != msg || d->codeword != cw || d->corrected != idx.size()) ++failures;
    });
  }
  CHECK(cases == 32 * (1 + 15 + 105 + 455));
  CHECK(failures == 0);
}

TEST_CASE("weight-4 errors on BCH(15,5) never crash") {
  const auto code = BchCode::create(4, 3);
  const auto msg = index_bits(19, 5);
  const auto cw = code.encode(msg);
  std::size_t rejected = 0, wrong = 0, total = 0;
  for (int a = 0; a < 15; ++a)
    for (int b = a + 1; b < 15; ++b)
      for (int c = b + 1; c < 15; ++c)
        for (int d = c + 1; d < 15; ++d) {
          BitKey rx = cw;
          for (int i : {a, b, c, d}) rx.flip(static_cast<std::size_t>(i));
          const auto dec = code.decode(rx);
          ++total;
          if (!dec) {
            ++rejected;
          } else {
            CHECK(hamming_distance(dec->codeword, rx) <= 3);
            for (auto s : code.syndromes(dec->codeword)) CHECK(s == 0);
            if (dec->message != msg) ++wrong;
          }
        }
  CHECK(total == 1365);
  CHECK(rejected + wrong == total);  // weight 4 is never within radius 3 of cw
  MESSAGE("weight-4: rejected " << rejected << ", miscorrected " << wrong);
}

TEST_CASE("round trip exhaustive for m <= 5") {
  Rng r(5);
  for (int m : {3, 4, 5}) {
    for (int t = 1; t < (1 << (m - 1)); ++t) {
      BchCode code = [&] {
        try {
          return BchCode::create(m, t);
        } catch (const InvalidArgument&) {
          return BchCode::create(m, 1);
        }
      }();
      if (code.t() != t) continue;
      const int n = code.length();
      const int weight = std::min(t, 3);
      for (int k = 0; k < 4; ++k) {
        const auto msg = random_bits(r, static_cast<std::size_t>(code.message_length()));
        const auto cw = code.encode(msg);
        std::size_t bad = 0;
        for_each_pattern(n, weight, [&](const std::vector<int>& idx) {
          BitKey rx = cw;
          for (int i : idx) rx.flip(static_cast<std::size_t>(i));
          const auto d = code.decode(rx);
          if (!d || d->message != msg) ++bad;
        });
        CAPTURE(m);
        CAPTURE(t);
        CHECK(bad == 0);
      }
    }
  }
}

TEST_CASE("randomized round trip for m in {6, 7, 8}") {
  Rng r(6);
  for (int m : {6, 7, 8}) {
    std::vector<BchCode> codes;
    for (int t : {1, 2, 5, 9, 13}) codes.push_back(BchCode::create(m, t));
    if (m == 8) codes.push_back(BchCode::create(8, 31));
    std::size_t bad = 0;
    const int trials = 100000;
    for (int k = 0; k < trials; ++k) {
      const auto& code = codes[static_cast<std::size_t>(k) % codes.size()];
      const auto msg = random_bits(r, static_cast<std::size_t>(code.message_length()));
      const auto cw = code.encode(msg);
      BitKey rx = cw;
      const auto w = r.below(static_cast<std::uint64_t>(code.t()) + 1);
      for (auto i : sample_without_replacement(r, static_cast<std::uint32_t>(code.length()),
                                               static_cast<std::uint32_t>(w)))
        rx.flip(i);
      const auto d = code.decode(rx);
      if (!d || d->message != msg || d->corrected != w) ++bad;
    }
    CAPTURE(m);
    CHECK(bad == 0);
  }
}

TEST_CASE("serialization round trip and errors") {
  const auto code = BchCode::create(8, 31);
  const auto bytes = code.serialize();
  const auto back = BchCode::deserialize(bytes);
  CHECK(back.length() == 255);
  CHECK(back.t() == 31);
  CHECK(back.generator() == code.generator());
  CHECK(back.primitive_poly() == code.primitive_poly());

  auto bad = bytes;
  bad[0] = 'X';
  CHECK_THROWS_AS(BchCode::deserialize(bad), FormatError);
  auto cut = bytes;
  cut.resize(cut.size() - 3);
  try {
    BchCode::deserialize(cut);
    FAIL("expected truncation");
  } catch (const FormatError& e) {
    CHECK(e.kind() == FormatError::Kind::truncated);
  }
  auto tampered = bytes;
  tampered.back() ^= 0x80;
  CHECK_THROWS_AS(BchCode::deserialize(tampered), FormatError);
}
