#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "photopuf/sim/types.hpp"

namespace photopuf::randomness {

/// Bits as 0/1 bytes.
using BitStream = std::vector<std::uint8_t>;

struct ExtractConfig {
  std::size_t bits_per_image = 20000;
  std::uint64_t seed = 0;
};

/// Concatenated RBM output of each image, in image order. Each image gets its
/// own helpers seeded from (seed, image index). Helpers draw from DFT bins
/// 1..(N-1)/2, so an image yields at most (N-1)/2 bits per helper; when more
/// bits are requested, further independent helpers are used.
BitStream extract_bits(std::span<const sim::SpeckleImage> images, const ExtractConfig& cfg);

/// Number of bits a single helper can draw from an image of `dims`.
std::size_t bits_per_helper(sim::Dims dims);

// ---------------------------------------------------------------------------

double erfc(double x);
/// Regularized upper incomplete gamma Q(a, x).
double igamc(double a, double x);
/// Standard normal CDF.
double normal_cdf(double x);

enum class TestId {
  frequency,
  block_frequency,
  cumulative_sums,
  runs,
  longest_run,
  fft,
  approximate_entropy,
  serial,
};

inline constexpr double kAlpha = 0.01;

const char* to_string(TestId id);
TestId parse_test_id(const std::string& name);
std::vector<TestId> all_tests();

struct TestParams {
  std::size_t block_frequency_m = 128;
  /// 0 selects min(10, floor(log2 n) - 6).
  std::size_t approximate_entropy_m = 0;
  /// 0 selects min(16, floor(log2 n) - 3).
  std::size_t serial_m = 0;
};

struct SubResult {
  std::string name;
  double p_value = 0.0;
  bool pass = false;
};

struct TestResult {
  TestId id;
  double statistic = 0.0;
  std::vector<SubResult> sub;  // one entry for single-part tests

  double p_value() const { return sub.front().p_value; }
  bool pass() const;
};

/// Runs one test. Throws InvalidArgument if the stream is shorter than the
/// test's minimum or contains values other than 0/1.
TestResult nist_test(std::span<const std::uint8_t> bits, TestId id, const TestParams& params = {});

struct SuiteRow {
  std::string name;
  std::size_t passed = 0;
  std::size_t total = 0;
  double proportion = 0.0;
  double band_low = 0.0;
  double band_high = 0.0;
  double uniformity_p = 0.0;
  bool proportion_ok = false;
  bool uniformity_ok = false;
};

/// Acceptance band p +- 3 sqrt(p (1 - p) / s), p = 0.99.
std::pair<double, double> proportion_band(std::size_t streams);

/// 10-bin chi-square over p-values, converted with Q(9/2, chi2/2).
double uniformity_p_value(std::span<const double> p_values);

inline constexpr double kUniformityAlpha = 0.0001;

/// One row per (sub)test over all streams.
std::vector<SuiteRow> suite_report(std::span<const BitStream> streams,
                                   std::span<const TestId> tests, const TestParams& params = {});

void write_suite_tsv(std::ostream& os, std::span<const SuiteRow> rows);

}  // namespace photopuf::randomness
