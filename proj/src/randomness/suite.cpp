#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <map>

#include "photopuf/common/errors.hpp"
#include "photopuf/randomness/randomness.hpp"

namespace photopuf::randomness {

std::pair<double, double> proportion_band(std::size_t streams) {
  if (streams == 0) throw InvalidArgument("proportion band: no streams");
  const double p = 1.0 - kAlpha;
  const double w = 3.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(streams));
  return {p - w, p + w};
}

double uniformity_p_value(std::span<const double> p_values) {
  if (p_values.empty()) throw InvalidArgument("uniformity: no p-values");
  std::array<double, 10> f{};
  for (double p : p_values) {
    const auto bin = std::min<std::size_t>(9, static_cast<std::size_t>(std::max(0.0, p) * 10.0));
    f[bin] += 1.0;
  }
  const double expected = static_cast<double>(p_values.size()) / 10.0;
  double chi2 = 0.0;
  for (double x : f) chi2 += (x - expected) * (x - expected) / expected;
  return igamc(4.5, chi2 / 2.0);
}

std::vector<SuiteRow> suite_report(std::span<const BitStream> streams,
                                   std::span<const TestId> tests, const TestParams& params) {
  if (streams.empty()) throw InvalidArgument("suite: no streams");
  if (tests.empty()) throw InvalidArgument("suite: no tests");
  std::vector<SuiteRow> rows;
  const auto [lo, hi] = proportion_band(streams.size());
  for (auto id : tests) {
    std::vector<std::string> names;
    std::map<std::string, std::vector<double>> pv;
    for (const auto& s : streams) {
      for (const auto& r : nist_test(s, id, params).sub) {
        if (!pv.count(r.name)) names.push_back(r.name);
        pv[r.name].push_back(r.p_value);
      }
    }
    for (const auto& name : names) {
      const auto& ps = pv[name];
      SuiteRow row;
      row.name = name;
      row.total = ps.size();
      for (double p : ps) row.passed += p >= kAlpha ? 1 : 0;
      row.proportion = static_cast<double>(row.passed) / static_cast<double>(row.total);
      row.band_low = lo;
      row.band_high = hi;
      row.uniformity_p = uniformity_p_value(ps);
      row.proportion_ok = row.proportion >= lo && row.proportion <= hi;
      row.uniformity_ok = row.uniformity_p >= kUniformityAlpha;
      rows.push_back(row);
    }
  }
  return rows;
}

void write_suite_tsv(std::ostream& os, std::span<const SuiteRow> rows) {
  os << "test\tpassed\ttotal\tproportion\tband_low\tband_high\tuniformity_p\tresult\n";
  os << std::fixed << std::setprecision(6);
  for (const auto& r : rows) {
    os << r.name << '\t' << r.passed << '\t' << r.total << '\t' << r.proportion << '\t'
       << r.band_low << '\t' << r.band_high << '\t' << r.uniformity_p << '\t'
       << (r.proportion_ok && r.uniformity_ok ? "pass" : "fail") << '\n';
  }
}

}  // namespace photopuf::randomness
