#pragma once

#include <cstddef>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "photopuf/common/bitkey.hpp"
#include "photopuf/sim/types.hpp"

namespace photopuf::eval {

double euclidean(std::span<const double> a, std::span<const double> b);
double euclidean(const sim::SpeckleImage& a, const sim::SpeckleImage& b);

/// Number of differing bits; see also photopuf::fractional_hamming.
std::size_t hamming(const BitKey& a, const BitKey& b);

/// Pearson coefficient over pixels. DegenerateInput if either side is constant.
double cross_correlation(std::span<const double> a, std::span<const double> b);
double cross_correlation(const sim::SpeckleImage& a, const sim::SpeckleImage& b);

double mean(std::span<const double> v);
/// Population standard deviation.
double stddev(std::span<const double> v);

struct Histogram {
  std::vector<double> edges;  // bins [e_i, e_{i+1}), last bin closed
  std::vector<std::size_t> counts;

  std::size_t total() const;
  std::vector<double> normalized() const;
};

/// Freedman-Diaconis edges: width 2 IQR n^(-1/3). Falls back to a single
/// unit-width bin around the value for constant data.
std::vector<double> freedman_diaconis_edges(std::span<const double> values);

/// Counts values into fixed edges; values outside the range throw.
Histogram histogram(std::span<const double> values, std::vector<double> edges);

/// Sum over bins of min(p_a, p_b). Both histograms must share bin edges.
double overlap(const Histogram& a, const Histogram& b);

struct DistanceReport {
  std::string metric;
  std::vector<double> values;
  double mean = 0.0;
  double stddev = 0.0;
  Histogram hist;
};

DistanceReport make_report(std::string metric, std::vector<double> values);
DistanceReport make_report(std::string metric, std::vector<double> values,
                           std::vector<double> edges);

/// Re-bins both reports on Freedman-Diaconis edges computed from the pooled
/// values, extended to cover both ranges.
void share_bins(DistanceReport& a, DistanceReport& b);

/// Overlap after binning both reports on shared pooled edges.
double overlap(const DistanceReport& a, const DistanceReport& b);

/// One row per bin: lower, upper, count, normalized mass.
void write_histogram_tsv(std::ostream& os, const DistanceReport& report);
/// One row per pair value.
void write_values_tsv(std::ostream& os, const DistanceReport& report);

}  // namespace photopuf::eval
