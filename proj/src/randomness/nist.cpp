#include <algorithm>
#include <cmath>
#include <numeric>

#include "photopuf/common/errors.hpp"
#include "photopuf/hashing/dft.hpp"
#include "photopuf/randomness/randomness.hpp"

namespace photopuf::randomness {

namespace {

using Bits = std::span<const std::uint8_t>;

void require_length(Bits b, std::size_t minimum, const char* test) {
  if (b.size() < minimum) {
    throw InvalidArgument(std::string(test) + ": stream of " + std::to_string(b.size()) +
                          " bits is below the minimum " + std::to_string(minimum));
  }
}

SubResult sub(std::string name, double p) {
  p = std::clamp(p, 0.0, 1.0);
  return {std::move(name), p, p >= kAlpha};
}

std::size_t floor_log2(std::size_t n) {
  std::size_t k = 0;
  while ((n >> (k + 1)) != 0) ++k;
  return k;
}

TestResult frequency(Bits b) {
  require_length(b, 100, "frequency");
  long long s = 0;
  for (auto x : b) s += x ? 1 : -1;
  const double s_obs = std::abs(static_cast<double>(s)) / std::sqrt(static_cast<double>(b.size()));
  return {TestId::frequency, s_obs, {sub("Frequency", erfc(s_obs / std::sqrt(2.0)))}};
}

TestResult block_frequency(Bits b, std::size_t m) {
  require_length(b, 100, "block frequency");
  if (m == 0 || m > b.size()) throw InvalidArgument("block frequency: bad block length");
  const std::size_t blocks = b.size() / m;
  double chi2 = 0.0;
  for (std::size_t i = 0; i < blocks; ++i) {
    const auto ones = std::accumulate(b.begin() + static_cast<std::ptrdiff_t>(i * m),
                                      b.begin() + static_cast<std::ptrdiff_t>((i + 1) * m), 0);
    const double pi = static_cast<double>(ones) / static_cast<double>(m);
    chi2 += (pi - 0.5) * (pi - 0.5);
  }
  chi2 *= 4.0 * static_cast<double>(m);
  return {TestId::block_frequency, chi2,
          {sub("BlockFrequency", igamc(static_cast<double>(blocks) / 2.0, chi2 / 2.0))}};
}

double cusum_p(std::size_t n_bits, long long z_max) {
  const double n = static_cast<double>(n_bits);
  const double z = static_cast<double>(z_max);
  if (z_max == 0) return 1.0;
  const double sq = std::sqrt(n);
  double sum1 = 0.0;
  for (long long k = static_cast<long long>(std::floor((-n / z + 1.0) / 4.0));
       k <= static_cast<long long>(std::floor((n / z - 1.0) / 4.0)); ++k) {
    sum1 += normal_cdf((4.0 * k + 1.0) * z / sq) - normal_cdf((4.0 * k - 1.0) * z / sq);
  }
  double sum2 = 0.0;
  for (long long k = static_cast<long long>(std::floor((-n / z - 3.0) / 4.0));
       k <= static_cast<long long>(std::floor((n / z - 1.0) / 4.0)); ++k) {
    sum2 += normal_cdf((4.0 * k + 3.0) * z / sq) - normal_cdf((4.0 * k + 1.0) * z / sq);
  }
  return 1.0 - sum1 + sum2;
}

TestResult cumulative_sums(Bits b) {
  require_length(b, 100, "cumulative sums");
  long long s = 0, fwd = 0;
  for (auto x : b) {
    s += x ? 1 : -1;
    fwd = std::max(fwd, std::abs(s));
  }
  s = 0;
  long long bwd = 0;
  for (auto it = b.rbegin(); it != b.rend(); ++it) {
    s += *it ? 1 : -1;
    bwd = std::max(bwd, std::abs(s));
  }
  return {TestId::cumulative_sums, static_cast<double>(fwd),
          {sub("CumulativeSums-forward", cusum_p(b.size(), fwd)),
           sub("CumulativeSums-backward", cusum_p(b.size(), bwd))}};
}

TestResult runs(Bits b) {
  require_length(b, 100, "runs");
  const double n = static_cast<double>(b.size());
  const double pi = static_cast<double>(std::accumulate(b.begin(), b.end(), 0LL)) / n;
  if (std::abs(pi - 0.5) >= 2.0 / std::sqrt(n)) return {TestId::runs, 0.0, {sub("Runs", 0.0)}};
  std::size_t v = 1;
  for (std::size_t i = 1; i < b.size(); ++i) v += b[i] != b[i - 1] ? 1 : 0;
  const double num = std::abs(static_cast<double>(v) - 2.0 * n * pi * (1.0 - pi));
  const double den = 2.0 * std::sqrt(2.0 * n) * pi * (1.0 - pi);
  return {TestId::runs, static_cast<double>(v), {sub("Runs", erfc(num / den))}};
}

TestResult longest_run(Bits b) {
  require_length(b, 128, "longest run");
  std::size_t m;
  std::size_t lo;  // run lengths <= lo fall in class 0
  std::vector<double> pi;
  if (b.size() < 6272) {
    m = 8;
    lo = 1;
    pi = {0.2148, 0.3672, 0.2305, 0.1875};
  } else if (b.size() < 750000) {
    m = 128;
    lo = 4;
    pi = {0.1174, 0.2430, 0.2493, 0.1752, 0.1027, 0.1124};
  } else {
    m = 10000;
    lo = 10;
    pi = {0.0882, 0.2092, 0.2483, 0.1933, 0.1208, 0.0675, 0.0727};
  }
  const std::size_t k = pi.size() - 1;
  const std::size_t blocks = b.size() / m;
  std::vector<double> nu(pi.size(), 0.0);
  for (std::size_t i = 0; i < blocks; ++i) {
    std::size_t run = 0, best = 0;
    for (std::size_t j = i * m; j < (i + 1) * m; ++j) {
      run = b[j] ? run + 1 : 0;
      best = std::max(best, run);
    }
    const std::size_t cls = best <= lo ? 0 : std::min(best - lo, k);
    nu[cls] += 1.0;
  }
  double chi2 = 0.0;
  const double nb = static_cast<double>(blocks);
  for (std::size_t i = 0; i < pi.size(); ++i) chi2 += (nu[i] - nb * pi[i]) * (nu[i] - nb * pi[i]) / (nb * pi[i]);
  return {TestId::longest_run, chi2,
          {sub("LongestRun", igamc(static_cast<double>(k) / 2.0, chi2 / 2.0))}};
}

TestResult fft(Bits b) {
  require_length(b, 1000, "fft");
  std::vector<double> x(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) x[i] = b[i] ? 1.0 : -1.0;
  const auto spectrum = hashing::real_dft_half(x);
  const double n = static_cast<double>(b.size());
  const double threshold = std::sqrt(std::log(1.0 / 0.05) * n);
  const std::size_t half = b.size() / 2;
  std::size_t below = 0;
  for (std::size_t k = 0; k < half; ++k) below += std::abs(spectrum[k]) < threshold ? 1 : 0;
  const double n0 = 0.95 * n / 2.0;
  const double d = (static_cast<double>(below) - n0) / std::sqrt(n * 0.95 * 0.05 / 4.0);
  return {TestId::fft, d, {sub("FFT", erfc(std::abs(d) / std::sqrt(2.0)))}};
}

// Overlapping m-bit pattern counts with wraparound.
std::vector<std::size_t> pattern_counts(Bits b, std::size_t m) {
  std::vector<std::size_t> counts(std::size_t{1} << m, 0);
  if (m == 0) return {b.size()};
  const std::size_t n = b.size();
  const std::size_t mask = (std::size_t{1} << m) - 1;
  std::size_t v = 0;
  for (std::size_t i = 0; i + 1 < m; ++i) v = (v << 1) | b[i];
  for (std::size_t i = 0; i < n; ++i) {
    v = ((v << 1) | b[(i + m - 1) % n]) & mask;
    ++counts[v];
  }
  return counts;
}

TestResult approximate_entropy(Bits b, std::size_t m) {
  require_length(b, 128, "approximate entropy");
  const std::size_t lg = floor_log2(b.size());
  if (m == 0) m = std::min<std::size_t>(10, lg - 6);
  if (m == 0 || m + 5 >= lg) throw InvalidArgument("approximate entropy: block length too large");
  const double n = static_cast<double>(b.size());
  auto phi = [&](std::size_t len) {
    double s = 0.0;
    for (auto c : pattern_counts(b, len)) {
      if (c == 0) continue;
      const double p = static_cast<double>(c) / n;
      s += p * std::log(p);
    }
    return s;
  };
  const double apen = phi(m) - phi(m + 1);
  const double chi2 = 2.0 * n * (std::log(2.0) - apen);
  return {TestId::approximate_entropy, chi2,
          {sub("ApproximateEntropy", igamc(std::ldexp(1.0, static_cast<int>(m) - 1), chi2 / 2.0))}};
}

TestResult serial(Bits b, std::size_t m) {
  require_length(b, 128, "serial");
  const std::size_t lg = floor_log2(b.size());
  if (m == 0) m = std::min<std::size_t>(16, lg - 3);
  if (m < 2 || m + 2 >= lg) throw InvalidArgument("serial: block length out of range");
  const double n = static_cast<double>(b.size());
  auto psi2 = [&](std::size_t len) {
    if (len == 0) return 0.0;
    double s = 0.0;
    for (auto c : pattern_counts(b, len)) s += static_cast<double>(c) * static_cast<double>(c);
    return std::ldexp(1.0, static_cast<int>(len)) / n * s - n;
  };
  const double p0 = psi2(m), p1 = psi2(m - 1), p2 = psi2(m - 2);
  const double d1 = p0 - p1;
  const double d2 = p0 - 2.0 * p1 + p2;
  return {TestId::serial, d1,
          {sub("Serial-1", igamc(std::ldexp(1.0, static_cast<int>(m) - 2), d1 / 2.0)),
           sub("Serial-2", igamc(std::ldexp(1.0, static_cast<int>(m) - 3), d2 / 2.0))}};
}

}  // namespace

const char* to_string(TestId id) {
  switch (id) {
    case TestId::frequency: return "frequency";
    case TestId::block_frequency: return "block-frequency";
    case TestId::cumulative_sums: return "cumulative-sums";
    case TestId::runs: return "runs";
    case TestId::longest_run: return "longest-run";
    case TestId::fft: return "fft";
    case TestId::approximate_entropy: return "approximate-entropy";
    case TestId::serial: return "serial";
  }
  return "?";
}

TestId parse_test_id(const std::string& name) {
  for (auto id : all_tests())
    if (name == to_string(id)) return id;
  static const char* known_elsewhere[] = {
      "non-overlapping-template", "overlapping-template", "universal", "linear-complexity",
      "rank", "random-excursions", "random-excursions-variant"};
  for (const char* k : known_elsewhere)
    if (name == k) throw Unsupported("test '" + name + "' is not implemented");
  throw InvalidArgument("unknown test '" + name + "'");
}

std::vector<TestId> all_tests() {
  return {TestId::frequency, TestId::block_frequency, TestId::cumulative_sums,
          TestId::runs,      TestId::longest_run,     TestId::fft,
          TestId::approximate_entropy, TestId::serial};
}

bool TestResult::pass() const {
  return std::all_of(sub.begin(), sub.end(), [](const SubResult& s) { return s.pass; });
}

TestResult nist_test(Bits bits, TestId id, const TestParams& params) {
  for (auto x : bits)
    if (x > 1) throw InvalidArgument("bit stream must hold 0/1 values");
  switch (id) {
    case TestId::frequency: return frequency(bits);
    case TestId::block_frequency: return block_frequency(bits, params.block_frequency_m);
    case TestId::cumulative_sums: return cumulative_sums(bits);
    case TestId::runs: return runs(bits);
    case TestId::longest_run: return longest_run(bits);
    case TestId::fft: return fft(bits);
    case TestId::approximate_entropy: return approximate_entropy(bits, params.approximate_entropy_m);
    case TestId::serial: return serial(bits, params.serial_m);
  }
  throw Unsupported("unknown test id");
}

}  // namespace photopuf::randomness
