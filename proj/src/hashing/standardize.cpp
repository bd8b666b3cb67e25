#include <cmath>

#include "photopuf/common/errors.hpp"
#include "photopuf/hashing/hashing.hpp"

namespace photopuf::hashing {

std::vector<double> standardize(std::span<const double> values) {
  if (values.empty()) throw InvalidArgument("standardize: empty input");
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= n;
  const double sd = std::sqrt(var);
  if (!(sd > 0.0) || !std::isfinite(sd)) throw DegenerateInput("standardize: zero variance");
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - mean) / sd;
  return out;
}

std::vector<double> standardize(const sim::SpeckleImage& image) {
  const auto px = image.pixels();
  std::vector<double> v(px.begin(), px.end());
  return standardize(v);
}

}  // namespace photopuf::hashing
