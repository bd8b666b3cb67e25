#include "photopuf/hashing/dft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>

#include "photopuf/common/errors.hpp"

namespace photopuf::hashing {

namespace {

// The FFTW planner is not reentrant; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

std::vector<std::complex<double>> real_dft_half(std::span<const double> x) {
  const int n = static_cast<int>(x.size());
  if (n == 0) throw InvalidArgument("DFT of an empty sequence");
  const int half = n / 2 + 1;
  double* in = fftw_alloc_real(static_cast<std::size_t>(n));
  fftw_complex* out = fftw_alloc_complex(static_cast<std::size_t>(half));
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_r2c_1d(n, in, out, FFTW_ESTIMATE);
  }
  std::copy(x.begin(), x.end(), in);
  fftw_execute(plan);
  std::vector<std::complex<double>> result(static_cast<std::size_t>(half));
  for (int k = 0; k < half; ++k) result[static_cast<std::size_t>(k)] = {out[k][0], out[k][1]};
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(in);
  fftw_free(out);
  return result;
}

std::vector<double> real_dft_real_parts(std::span<const double> x) {
  const auto half = real_dft_half(x);
  const std::size_t n = x.size();
  std::vector<double> re(n);
  for (std::size_t k = 0; k < n; ++k) re[k] = k < half.size() ? half[k].real() : half[n - k].real();
  return re;
}

}  // namespace photopuf::hashing
