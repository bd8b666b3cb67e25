#include <iomanip>

#include "photopuf/common/errors.hpp"
#include "photopuf/common/random.hpp"
#include "photopuf/eval/campaign.hpp"

namespace photopuf::eval {

namespace {

void check_sets(std::span<const BitKey> a, std::span<const BitKey> b) {
  if (a.empty() || b.empty()) throw InvalidArgument("success curve: empty key set");
  if (a.size() != b.size()) throw InvalidArgument("success curve: set sizes differ");
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].size() != a[0].size() || b[i].size() != a[0].size())
      throw InvalidArgument("success curve: keys must share one length");
}

}  // namespace

std::optional<std::size_t> SuccessCurve::first_reaching(double level) const {
  for (std::size_t i = 0; i < t.size(); ++i)
    if (probability[i] >= level) return t[i];
  return std::nullopt;
}

SuccessCurve success_curve(std::span<const BitKey> enrolled, std::span<const BitKey> authenticated,
                           std::size_t t_max) {
  check_sets(enrolled, authenticated);
  std::vector<std::size_t> hist(enrolled[0].size() + 1, 0);
  for (std::size_t i = 0; i < enrolled.size(); ++i)
    ++hist[hamming_distance(enrolled[i], authenticated[i])];
  SuccessCurve c;
  c.pairs = enrolled.size();
  std::size_t cum = 0;
  for (std::size_t t = 0; t <= t_max; ++t) {
    if (t < hist.size()) cum += hist[t];
    c.t.push_back(t);
    c.probability.push_back(static_cast<double>(cum) / static_cast<double>(c.pairs));
  }
  return c;
}

SuccessCurve decoded_success_curve(std::span<const BitKey> enrolled,
                                   std::span<const BitKey> authenticated, int m,
                                   std::span<const std::size_t> t_values, std::uint64_t seed) {
  check_sets(enrolled, authenticated);
  SuccessCurve c;
  c.pairs = enrolled.size();
  for (auto t : t_values) {
    const auto code = bch::BchCode::create(m, static_cast<int>(t));
    if (enrolled[0].size() != static_cast<std::size_t>(code.length()))
      throw InvalidArgument("success curve: key length differs from the code length");
    Rng rng(derive_seed({seed, t}));
    std::size_t ok = 0;
    for (std::size_t i = 0; i < enrolled.size(); ++i) {
      BitKey secret(static_cast<std::size_t>(code.message_length()));
      for (std::size_t b = 0; b < secret.size(); ++b) secret.set(b, rng.bit());
      const BitKey offset = enrolled[i] ^ code.encode(secret);
      const auto dec = code.decode(authenticated[i] ^ offset);
      if (dec && (offset ^ dec->codeword) == enrolled[i]) ++ok;
    }
    c.t.push_back(t);
    c.probability.push_back(static_cast<double>(ok) / static_cast<double>(c.pairs));
  }
  return c;
}

void write_curve_tsv(std::ostream& os, const SuccessCurve& c) {
  os << "t\tprobability\n" << std::setprecision(10);
  for (std::size_t i = 0; i < c.t.size(); ++i) os << c.t[i] << '\t' << c.probability[i] << '\n';
}

}  // namespace photopuf::eval
