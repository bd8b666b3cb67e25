#include "photopuf/eval/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "photopuf/common/errors.hpp"

namespace photopuf::eval {

namespace {

std::vector<double> as_doubles(const sim::SpeckleImage& img) {
  return {img.pixels().begin(), img.pixels().end()};
}

}  // namespace

double euclidean(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidArgument("euclidean: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

double euclidean(const sim::SpeckleImage& a, const sim::SpeckleImage& b) {
  if (a.dims() != b.dims()) throw InvalidArgument("euclidean: image dims differ");
  double s = 0.0;
  const auto pa = a.pixels();
  const auto pb = b.pixels();
  for (std::size_t i = 0; i < pa.size(); ++i) {
    const double d = static_cast<double>(pa[i]) - static_cast<double>(pb[i]);
    s += d * d;
  }
  return std::sqrt(s);
}

std::size_t hamming(const BitKey& a, const BitKey& b) { return hamming_distance(a, b); }

double cross_correlation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidArgument("cross_correlation: size mismatch");
  if (a.empty()) throw InvalidArgument("cross_correlation: empty input");
  const double ma = mean(a);
  const double mb = mean(b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) throw DegenerateInput("cross_correlation: zero variance");
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

double cross_correlation(const sim::SpeckleImage& a, const sim::SpeckleImage& b) {
  if (a.dims() != b.dims()) throw InvalidArgument("cross_correlation: image dims differ");
  return cross_correlation(as_doubles(a), as_doubles(b));
}

double mean(std::span<const double> v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double stddev(std::span<const double> v) {
  if (v.empty()) return 0.0;
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size()));
}

}  // namespace photopuf::eval
