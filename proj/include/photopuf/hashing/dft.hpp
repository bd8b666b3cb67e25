#pragma once

#include <complex>
#include <span>
#include <vector>

namespace photopuf::hashing {

/// Unnormalized forward DFT of a real sequence, X[k] = sum_n x[n] e^{-2 pi i k n / N},
/// returned for k = 0 .. N/2 (the rest follows by conjugate symmetry).
std::vector<std::complex<double>> real_dft_half(std::span<const double> x);

/// Re X[k] for every k in [0, N).
std::vector<double> real_dft_real_parts(std::span<const double> x);

}  // namespace photopuf::hashing
