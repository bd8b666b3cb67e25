#include "photopuf/sim/token.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "photopuf/common/digest.hpp"
#include "photopuf/common/errors.hpp"
#include "photopuf/common/random.hpp"

namespace photopuf::sim {

namespace {

constexpr std::uint64_t kRowStream = 0x524F57ULL;    // "ROW"
constexpr std::uint64_t kKnotStream = 0x4B4E4F54ULL;  // "KNOT"
constexpr std::uint64_t kPhaseStream = 0x5048ULL;
constexpr std::uint64_t kIntensityStream = 0x494EULL;
constexpr std::uint16_t kDescriptorVersion = 1;

// exp(i phi); Taylor series for small angles (error below 3e-8 for |phi| < 1).
std::complex<double> unit_phasor(double phi) {
  if (std::abs(phi) >= 1.0) return {std::cos(phi), std::sin(phi)};
  const double p2 = phi * phi;
  const double c = 1.0 - p2 / 2.0 * (1.0 - p2 / 12.0 * (1.0 - p2 / 30.0 * (1.0 - p2 / 56.0 * (1.0 - p2 / 90.0))));
  const double s = phi * (1.0 - p2 / 6.0 * (1.0 - p2 / 20.0 * (1.0 - p2 / 42.0 * (1.0 - p2 / 72.0))));
  return {c, s};
}

double phase_sigma_for_capture(const NoiseParams& noise, Rng& rng) {
  double sigma = noise.phase_drift_sigma + noise.drift_coeff * std::abs(noise.delta_t);
  if (noise.vibration_sigma > 0.0) sigma += std::abs(rng.normal()) * noise.vibration_sigma;
  return sigma;
}

SpeckleImage quantize(Dims out, std::span<const std::complex<double>> field, double gain,
                      const NoiseParams& noise, const Camera& camera) {
  if (camera.bit_depth < 1 || camera.bit_depth > 16) {
    throw InvalidArgument("camera bit depth must be in [1, 16]");
  }
  const double maxv = static_cast<double>((1U << camera.bit_depth) - 1);
  const double noise_abs = noise.intensity_sigma * maxv;
  Rng rng(derive_seed({noise.noise_seed, kIntensityStream}));
  std::vector<std::uint16_t> px(field.size());
  for (std::size_t q = 0; q < field.size(); ++q) {
    double v = gain * std::norm(field[q]);
    if (noise_abs > 0.0) v += noise_abs * rng.normal();
    v = std::floor(v + 0.5);
    px[q] = static_cast<std::uint16_t>(std::clamp(v, 0.0, maxv));
  }
  return SpeckleImage(out.rows, out.cols, std::move(px), camera.bit_depth);
}

double mean_level(const Camera& camera) {
  return camera.mean_fraction * static_cast<double>((1U << camera.bit_depth) - 1);
}

void check_wavelength(double nm) {
  if (!(nm >= kTuningMinNm && nm <= kTuningMaxNm)) {
    throw InvalidArgument("wavelength " + std::to_string(nm) + " nm outside tuning range [" +
                          std::to_string(kTuningMinNm) + ", " + std::to_string(kTuningMaxNm) +
                          "]");
  }
}

/// AR(1) walk over the wavelength knots of one token.
class KnotWalk {
 public:
  explicit KnotWalk(const TokenModel& token)
      : token_(token),
        spacing_pm_(token.wl_decorrelation_pm() / 4.0),
        rho_(std::exp(-0.25)),
        innovation_(std::sqrt(1.0 - std::exp(-0.5))),
        current_(draw(0)),
        next_(current_.size()) {
    step_into(next_, current_, 1);
  }

  double spacing_pm() const { return spacing_pm_; }
  std::size_t index() const { return index_; }

  void advance_to(std::size_t k) {
    while (index_ < k) {
      std::swap(current_, next_);
      ++index_;
      step_into(next_, current_, index_ + 1);
    }
  }

  /// Field at fractional knot offset f in [0, 1) past the current knot.
  std::vector<std::complex<double>> at(double f) const {
    if (f == 0.0) return current_;
    const double L = token_.wl_decorrelation_pm();
    const double delta = f * spacing_pm_;
    const double ra = std::exp(-delta / L);
    const double rb = std::exp(-(spacing_pm_ - delta) / L);
    const double a = ra * (1.0 - rb * rb);
    const double b = rb * (1.0 - ra * ra);
    const double norm = std::sqrt(a * a + b * b + 2.0 * a * b * rho_);
    std::vector<std::complex<double>> out(current_.size());
    for (std::size_t q = 0; q < out.size(); ++q) out[q] = (a * current_[q] + b * next_[q]) / norm;
    return out;
  }

 private:
  std::vector<std::complex<double>> draw(std::size_t k) const {
    Rng rng(derive_seed({token_.seed(), static_cast<std::uint64_t>(token_.kind()),
                         token_.grid().rows, token_.grid().cols, token_.out().rows,
                         token_.out().cols, kKnotStream, k}));
    std::vector<std::complex<double>> w(token_.out().count());
    for (auto& z : w) z = rng.complex_normal();
    return w;
  }

  void step_into(std::vector<std::complex<double>>& dst, const std::vector<std::complex<double>>& src,
                 std::size_t k) const {
    const auto w = draw(k);
    for (std::size_t q = 0; q < dst.size(); ++q) dst[q] = rho_ * src[q] + innovation_ * w[q];
  }

  const TokenModel& token_;
  double spacing_pm_;
  double rho_;
  double innovation_;
  std::size_t index_ = 0;
  std::vector<std::complex<double>> current_;
  std::vector<std::complex<double>> next_;
};

/// Knot index and fractional offset of a wavelength; offsets within 1e-9 of
/// a knot snap onto it.
std::pair<std::size_t, double> knot_position(double lambda_nm, double spacing_pm) {
  const double u = (lambda_nm - kTuningMinNm) * 1000.0 / spacing_pm;
  const double nearest = std::round(u);
  if (std::abs(u - nearest) < 1e-9) return {static_cast<std::size_t>(nearest), 0.0};
  const double k = std::floor(u);
  return {static_cast<std::size_t>(k), u - k};
}

SpeckleImage wavelength_capture(const TokenModel& token, std::vector<std::complex<double>> field,
                                const NoiseParams& noise, const Camera& camera) {
  Rng rng(derive_seed({noise.noise_seed, kPhaseStream}));
  const double sigma = phase_sigma_for_capture(noise, rng);
  if (sigma > 0.0) {
    // Aggregate of many independently drifting partial fields: the coherent
    // part shrinks by exp(-sigma^2/2), the rest becomes fresh speckle.
    const double keep = std::exp(-0.5 * sigma * sigma);
    const double fresh = std::sqrt(1.0 - keep * keep);
    for (auto& e : field) e = keep * e + fresh * rng.complex_normal();
  }
  return quantize(token.out(), field, mean_level(camera), noise, camera);
}

}  // namespace

const char* to_string(TokenKind kind) {
  return kind == TokenKind::pof ? "pof" : "diffuser";
}

TokenKind parse_token_kind(const std::string& text) {
  if (text == "diffuser") return TokenKind::diffuser;
  if (text == "pof") return TokenKind::pof;
  throw InvalidArgument("unknown token kind: " + text + " (expected diffuser|pof)");
}

double default_decorrelation_pm(TokenKind kind) {
  return kind == TokenKind::pof ? 80.0 : 2000.0;
}

TokenModel TokenModel::create(std::uint64_t seed, TokenKind kind, Dims grid, Dims out) {
  return create(seed, kind, grid, out, default_decorrelation_pm(kind));
}

TokenModel TokenModel::create(std::uint64_t seed, TokenKind kind, Dims grid, Dims out,
                              double wl_decorrelation_pm) {
  if (grid.count() == 0 || out.count() == 0) {
    throw InvalidArgument("token dimensions must be positive");
  }
  if (!(wl_decorrelation_pm > 0.0) || !std::isfinite(wl_decorrelation_pm)) {
    throw InvalidArgument("wavelength decorrelation length must be positive");
  }
  const std::size_t P = grid.count();
  const std::size_t N = out.count();
  auto tensor = std::make_shared<std::vector<std::complex<float>>>(P * N);
  const double scale = 1.0 / std::sqrt(static_cast<double>(P));
  for (std::size_t i = 0; i < P; ++i) {
    Rng rng(derive_seed({seed, static_cast<std::uint64_t>(kind), grid.rows, grid.cols, out.rows,
                         out.cols, kRowStream, i}));
    auto* row = tensor->data() + i * N;
    for (std::size_t q = 0; q < N; ++q) {
      row[q] = std::complex<float>(rng.complex_normal() * scale);
    }
  }
  return TokenModel(seed, kind, grid, out, wl_decorrelation_pm, std::move(tensor));
}

std::span<const std::complex<float>> TokenModel::row(std::size_t challenge_pixel) const {
  if (challenge_pixel >= grid_.count()) throw InvalidArgument("challenge pixel out of range");
  const std::size_t N = out_.count();
  return {tensor_->data() + challenge_pixel * N, N};
}

Bytes TokenModel::descriptor() const {
  ByteWriter w;
  w.raw(std::string_view("PUFT"));
  w.u16le(kDescriptorVersion);
  w.u8(static_cast<std::uint8_t>(kind_));
  w.u64le(seed_);
  w.u32le(grid_.rows);
  w.u32le(grid_.cols);
  w.u32le(out_.rows);
  w.u32le(out_.cols);
  w.f64le(wl_decorrelation_pm_);
  return std::move(w).bytes();
}

TokenModel TokenModel::from_descriptor(std::span<const std::uint8_t> data) {
  ByteReader r(data);
  r.expect_magic("PUFT");
  const auto version = r.u16le();
  if (version != kDescriptorVersion) {
    throw FormatError(FormatError::Kind::bad_version,
                      "token descriptor: unsupported version " + std::to_string(version));
  }
  const auto kind = r.u8();
  if (kind > 1) throw FormatError(FormatError::Kind::malformed, "token descriptor: bad kind");
  const auto seed = r.u64le();
  Dims grid{r.u32le(), r.u32le()};
  Dims out{r.u32le(), r.u32le()};
  const double decorrelation = r.f64le();
  if (grid.count() == 0 || out.count() == 0 || grid.count() * out.count() > (1ULL << 28) ||
      !(decorrelation > 0.0)) {
    throw FormatError(FormatError::Kind::malformed, "token descriptor: bad dimensions");
  }
  return create(seed, static_cast<TokenKind>(kind), grid, out, decorrelation);
}

TokenId TokenModel::id() const {
  const auto d = sha256(descriptor());
  TokenId out{};
  std::copy_n(d.begin(), out.size(), out.begin());
  return out;
}

void NoiseParams::validate() const {
  for (double v : {intensity_sigma, phase_drift_sigma, drift_coeff, vibration_sigma}) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw InvalidArgument("noise parameters must be finite and non-negative");
    }
  }
  if (!std::isfinite(delta_t)) throw InvalidArgument("delta_t must be finite");
}

NoiseParams NoiseParams::defaults() {
  NoiseParams n;
  n.intensity_sigma = 0.01;
  n.phase_drift_sigma = 0.05;
  return n;
}

std::vector<std::complex<double>> clean_field(const TokenModel& token,
                                              const PixelPattern& pattern) {
  if (pattern.dims() != token.grid()) {
    throw InvalidArgument("challenge mask " + to_string(pattern.dims()) +
                          " does not match token grid " + to_string(token.grid()));
  }
  std::vector<std::complex<double>> field(token.out().count());
  for (std::size_t i = 0; i < pattern.dims().count(); ++i) {
    if (!pattern.on(i)) continue;
    const auto row = token.row(i);
    for (std::size_t q = 0; q < field.size(); ++q) {
      field[q] += std::complex<double>(row[q]);
    }
  }
  return field;
}

SpeckleImage respond(const TokenModel& token, const PixelPattern& pattern,
                     const NoiseParams& noise, const Camera& camera) {
  noise.validate();
  if (pattern.dims() != token.grid()) {
    throw InvalidArgument("challenge mask " + to_string(pattern.dims()) +
                          " does not match token grid " + to_string(token.grid()));
  }
  Rng rng(derive_seed({noise.noise_seed, kPhaseStream}));
  const double sigma = phase_sigma_for_capture(noise, rng);
  std::vector<std::complex<double>> field;
  if (sigma > 0.0) {
    field.assign(token.out().count(), {0.0, 0.0});
    for (std::size_t i = 0; i < pattern.dims().count(); ++i) {
      if (!pattern.on(i)) continue;
      const auto row = token.row(i);
      for (std::size_t q = 0; q < field.size(); ++q) {
        const double phi = sigma * rng.normal();
        field[q] += std::complex<double>(row[q]) * unit_phasor(phi);
      }
    }
  } else {
    field = clean_field(token, pattern);
  }
  const std::size_t lit = pattern.count_on();
  const double gain =
      lit == 0 ? 0.0
               : mean_level(camera) * static_cast<double>(token.grid().count()) /
                     static_cast<double>(lit);
  return quantize(token.out(), field, gain, noise, camera);
}

SpeckleImage respond(const TokenModel& token, const Challenge& challenge,
                     const NoiseParams& noise, const Camera& camera) {
  if (const auto* p = std::get_if<PixelPattern>(&challenge)) {
    return respond(token, *p, noise, camera);
  }
  return wavelength_response(token, std::get<Wavelength>(challenge).nm, noise, camera);
}

std::vector<std::complex<double>> wavelength_field(const TokenModel& token, double lambda_nm) {
  check_wavelength(lambda_nm);
  KnotWalk walk(token);
  const auto [k, f] = knot_position(lambda_nm, walk.spacing_pm());
  walk.advance_to(k);
  return walk.at(f);
}

SpeckleImage wavelength_response(const TokenModel& token, double lambda_nm,
                                 const NoiseParams& noise, const Camera& camera) {
  noise.validate();
  return wavelength_capture(token, wavelength_field(token, lambda_nm), noise, camera);
}

std::vector<SpeckleImage> wavelength_sweep(const TokenModel& token,
                                           std::span<const double> lambdas_nm,
                                           const NoiseParams& noise, const Camera& camera) {
  noise.validate();
  for (double l : lambdas_nm) check_wavelength(l);
  std::vector<std::size_t> order(lambdas_nm.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return lambdas_nm[a] < lambdas_nm[b]; });
  std::vector<SpeckleImage> out(lambdas_nm.size());
  if (lambdas_nm.empty()) return out;
  KnotWalk walk(token);
  for (auto i : order) {
    const auto [k, f] = knot_position(lambdas_nm[i], walk.spacing_pm());
    walk.advance_to(k);
    out[i] = wavelength_capture(token, walk.at(f), noise.with_seed(derive_seed({noise.noise_seed, i})),
                                camera);
  }
  return out;
}

}  // namespace photopuf::sim
