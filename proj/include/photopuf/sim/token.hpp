#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "photopuf/common/bytes.hpp"
#include "photopuf/sim/types.hpp"

namespace photopuf::sim {

enum class TokenKind : std::uint8_t { diffuser = 0, pof = 1 };

const char* to_string(TokenKind kind);
TokenKind parse_token_kind(const std::string& text);

/// Laser tuning range for wavelength challenges.
inline constexpr double kTuningMinNm = 1540.0;
inline constexpr double kTuningMaxNm = 1570.0;

/// Field decorrelation length used when none is given: polymer fibre tokens
/// decorrelate within tens of picometres, bulk diffusers over nanometres.
double default_decorrelation_pm(TokenKind kind);

using TokenId = std::array<std::uint8_t, 16>;

/// Simulated scattering element.
///
/// The transmission tensor holds one complex amplitude per (challenge pixel,
/// output pixel), drawn i.i.d. circular Gaussian with variance 1/P (P = number
/// of challenge pixels) so that full illumination has unit mean intensity.
/// Rows are generated from independent sub-streams of the token seed. The
/// tensor is immutable and shared between copies.
class TokenModel {
 public:
  /// Throws InvalidArgument for zero dimensions or a non-positive
  /// decorrelation length.
  static TokenModel create(std::uint64_t seed, TokenKind kind, Dims grid, Dims out,
                           double wl_decorrelation_pm);
  static TokenModel create(std::uint64_t seed, TokenKind kind, Dims grid = {16, 16},
                           Dims out = {128, 128});

  std::uint64_t seed() const { return seed_; }
  TokenKind kind() const { return kind_; }
  Dims grid() const { return grid_; }
  Dims out() const { return out_; }
  double wl_decorrelation_pm() const { return wl_decorrelation_pm_; }

  /// Output-plane amplitudes contributed by one challenge pixel.
  std::span<const std::complex<float>> row(std::size_t challenge_pixel) const;
  std::complex<float> field(std::size_t challenge_pixel, std::size_t out_pixel) const {
    return row(challenge_pixel)[out_pixel];
  }

  /// "PUFT" record: version u16, kind u8, seed u64, grid rows/cols and output
  /// rows/cols as u32, decorrelation length f64 (pm); little-endian.
  Bytes descriptor() const;
  static TokenModel from_descriptor(std::span<const std::uint8_t> data);

  /// First 16 bytes of SHA-256 over the descriptor.
  TokenId id() const;

 private:
  TokenModel(std::uint64_t seed, TokenKind kind, Dims grid, Dims out, double decorrelation,
             std::shared_ptr<const std::vector<std::complex<float>>> tensor)
      : seed_(seed),
        kind_(kind),
        grid_(grid),
        out_(out),
        wl_decorrelation_pm_(decorrelation),
        tensor_(std::move(tensor)) {}

  std::uint64_t seed_;
  TokenKind kind_;
  Dims grid_;
  Dims out_;
  double wl_decorrelation_pm_;
  std::shared_ptr<const std::vector<std::complex<float>>> tensor_;
};

/// Capture noise. All-zero parameters give bit-exact deterministic responses.
struct NoiseParams {
  /// Additive Gaussian intensity noise, fraction of full scale.
  double intensity_sigma = 0.0;
  /// Baseline per-(pixel, output) phase jitter, radians.
  double phase_drift_sigma = 0.0;
  /// Temperature offset from the enrollment condition, degrees Celsius.
  double delta_t = 0.0;
  /// Thermal phase drift, radians per degree Celsius.
  double drift_coeff = 0.15;
  /// Mechanical vibration: each capture adds |N(0, vibration_sigma)| radians
  /// to the phase jitter.
  double vibration_sigma = 0.0;
  std::uint64_t noise_seed = 0;

  void validate() const;
  bool is_zero() const {
    return intensity_sigma == 0.0 && phase_drift_sigma == 0.0 && delta_t == 0.0 &&
           vibration_sigma == 0.0;
  }
  NoiseParams with_seed(std::uint64_t seed) const {
    NoiseParams n = *this;
    n.noise_seed = seed;
    return n;
  }

  /// Simulator default for a stabilized device.
  static NoiseParams defaults();
};

/// Quantization settings of the simulated camera.
struct Camera {
  int bit_depth = 8;
  /// Mean response level as a fraction of full scale (auto exposure).
  double mean_fraction = 0.1875;
};

/// Pre-noise complex field at the output plane: E(q) = sum_i mask_i * t[i][q].
std::vector<std::complex<double>> clean_field(const TokenModel& token,
                                              const PixelPattern& pattern);

/// Response to a pixel-pattern challenge. Phase drift is applied per
/// (challenge pixel, output pixel) before the field sum, intensity noise after
/// |E|^2, then round-half-up and clamp to the bit depth.
SpeckleImage respond(const TokenModel& token, const PixelPattern& pattern,
                     const NoiseParams& noise = {}, const Camera& camera = {});

/// Response to either kind of challenge.
SpeckleImage respond(const TokenModel& token, const Challenge& challenge,
                     const NoiseParams& noise = {}, const Camera& camera = {});

/// Uniform-illumination output field at a laser wavelength. The field follows
/// an exponentially correlated complex Gaussian process in wavelength,
/// corr(E(l), E(l + d)) = exp(-d / decorrelation), realized as an AR(1) walk
/// over seeded knots spaced decorrelation / 4 apart and interpolated between
/// knots. Throws InvalidArgument outside the tuning range.
std::vector<std::complex<double>> wavelength_field(const TokenModel& token, double lambda_nm);

SpeckleImage wavelength_response(const TokenModel& token, double lambda_nm,
                                 const NoiseParams& noise = {}, const Camera& camera = {});

/// Responses for many wavelengths with a single knot walk. Capture i uses
/// noise seed derive_seed({noise.noise_seed, i}).
std::vector<SpeckleImage> wavelength_sweep(const TokenModel& token,
                                           std::span<const double> lambdas_nm,
                                           const NoiseParams& noise = {},
                                           const Camera& camera = {});

}  // namespace photopuf::sim
