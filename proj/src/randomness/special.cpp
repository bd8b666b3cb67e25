#include <boost/math/special_functions/gamma.hpp>

#include <cmath>

#include "photopuf/common/errors.hpp"
#include "photopuf/randomness/randomness.hpp"

namespace photopuf::randomness {

double erfc(double x) { return std::erfc(x); }

double igamc(double a, double x) {
  if (!(a > 0.0)) throw InvalidArgument("igamc: a must be positive");
  if (x <= 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  return boost::math::gamma_q(a, x);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace photopuf::randomness
