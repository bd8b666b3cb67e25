#include <algorithm>
#include <cmath>
#include <iomanip>

#include "photopuf/common/errors.hpp"
#include "photopuf/eval/metrics.hpp"

namespace photopuf::eval {

namespace {

double quantile(std::vector<double> sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::vector<double> edges_between(double lo, double hi, double width) {
  const auto bins = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil((hi - lo) / width)));
  std::vector<double> e(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) e[i] = lo + width * static_cast<double>(i);
  e.back() = std::max(e.back(), hi);
  return e;
}

constexpr std::size_t kMaxBins = 10000;

}  // namespace

std::size_t Histogram::total() const {
  std::size_t s = 0;
  for (auto c : counts) s += c;
  return s;
}

std::vector<double> Histogram::normalized() const {
  const double n = static_cast<double>(total());
  std::vector<double> p(counts.size(), 0.0);
  if (n == 0) return p;
  for (std::size_t i = 0; i < counts.size(); ++i) p[i] = static_cast<double>(counts[i]) / n;
  return p;
}

std::vector<double> freedman_diaconis_edges(std::span<const double> values) {
  if (values.empty()) throw InvalidArgument("histogram: no values");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const double lo = v.front();
  const double hi = v.back();
  if (hi == lo) return {lo - 0.5, lo + 0.5};
  const double iqr = quantile(v, 0.75) - quantile(v, 0.25);
  double width = 2.0 * iqr / std::cbrt(static_cast<double>(v.size()));
  if (!(width > 0.0)) width = (hi - lo) / std::max(1.0, std::ceil(std::log2(v.size()) + 1.0));
  width = std::max(width, (hi - lo) / static_cast<double>(kMaxBins));
  return edges_between(lo, hi, width);
}

Histogram histogram(std::span<const double> values, std::vector<double> edges) {
  if (edges.size() < 2 || !std::is_sorted(edges.begin(), edges.end()))
    throw InvalidArgument("histogram: edges must be increasing");
  Histogram h;
  h.counts.assign(edges.size() - 1, 0);
  for (double x : values) {
    if (x < edges.front() || x > edges.back())
      throw InvalidArgument("histogram: value outside bin range");
    auto it = std::upper_bound(edges.begin(), edges.end(), x);
    auto bin = static_cast<std::size_t>(it - edges.begin());
    bin = bin == 0 ? 0 : bin - 1;
    bin = std::min(bin, h.counts.size() - 1);
    ++h.counts[bin];
  }
  h.edges = std::move(edges);
  return h;
}

double overlap(const Histogram& a, const Histogram& b) {
  if (a.edges != b.edges) throw InvalidArgument("overlap: histograms do not share bin edges");
  const auto pa = a.normalized();
  const auto pb = b.normalized();
  double s = 0.0;
  for (std::size_t i = 0; i < pa.size(); ++i) s += std::min(pa[i], pb[i]);
  return std::clamp(s, 0.0, 1.0);
}

DistanceReport make_report(std::string metric, std::vector<double> values,
                           std::vector<double> edges) {
  DistanceReport r;
  r.metric = std::move(metric);
  r.mean = mean(values);
  r.stddev = stddev(values);
  r.hist = histogram(values, std::move(edges));
  r.values = std::move(values);
  return r;
}

DistanceReport make_report(std::string metric, std::vector<double> values) {
  auto edges = freedman_diaconis_edges(values);
  return make_report(std::move(metric), std::move(values), std::move(edges));
}

void share_bins(DistanceReport& a, DistanceReport& b) {
  std::vector<double> pooled = a.values;
  pooled.insert(pooled.end(), b.values.begin(), b.values.end());
  const auto edges = freedman_diaconis_edges(pooled);
  a.hist = histogram(a.values, edges);
  b.hist = histogram(b.values, edges);
}

double overlap(const DistanceReport& a, const DistanceReport& b) {
  DistanceReport x = a;
  DistanceReport y = b;
  share_bins(x, y);
  return overlap(x.hist, y.hist);
}

void write_histogram_tsv(std::ostream& os, const DistanceReport& r) {
  os << "lower\tupper\tcount\tmass\n";
  const auto p = r.hist.normalized();
  os << std::setprecision(10);
  for (std::size_t i = 0; i < r.hist.counts.size(); ++i)
    os << r.hist.edges[i] << '\t' << r.hist.edges[i + 1] << '\t' << r.hist.counts[i] << '\t'
       << p[i] << '\n';
}

void write_values_tsv(std::ostream& os, const DistanceReport& r) {
  os << "index\t" << r.metric << '\n';
  os << std::setprecision(10);
  for (std::size_t i = 0; i < r.values.size(); ++i) os << i << '\t' << r.values[i] << '\n';
}

}  // namespace photopuf::eval
