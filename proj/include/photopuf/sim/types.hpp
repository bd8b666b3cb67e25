#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "photopuf/common/bytes.hpp"

namespace photopuf::sim {

struct Dims {
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;

  std::size_t count() const { return static_cast<std::size_t>(rows) * cols; }
  bool operator==(const Dims&) const = default;
};

/// Parses "RxC" (e.g. "16x16").
Dims parse_dims(const std::string& text);
std::string to_string(Dims d);

/// Binary on/off mask over the challenge pixel grid, row-major.
class PixelPattern {
 public:
  PixelPattern() = default;
  PixelPattern(Dims dims, std::vector<std::uint8_t> mask);

  Dims dims() const { return dims_; }
  std::span<const std::uint8_t> mask() const { return mask_; }
  bool on(std::size_t i) const { return mask_[i] != 0; }
  std::size_t count_on() const;

  /// Pixels where either pattern is on.
  PixelPattern operator|(const PixelPattern& other) const;
  bool operator==(const PixelPattern&) const = default;

 private:
  Dims dims_;
  std::vector<std::uint8_t> mask_;
};

/// Laser wavelength challenge in nanometres.
struct Wavelength {
  double nm = 0.0;
  bool operator==(const Wavelength&) const = default;
};

using Challenge = std::variant<PixelPattern, Wavelength>;

/// Each pixel independently on with probability `density`; redrawn until at
/// least one pixel is lit.
PixelPattern random_pattern(Dims grid, std::uint64_t seed, double density = 0.5);

/// Exactly `weight` pixels on, positions uniform.
PixelPattern fixed_weight_pattern(Dims grid, std::size_t weight, std::uint64_t seed);

/// Pattern whose i-th pixel is bit i of `index` (grids of at most 64 pixels).
PixelPattern enumerated_pattern(Dims grid, std::uint64_t index);

/// Challenge blob: u8 type (0 = pattern, 1 = wavelength), then either
/// rows u32, cols u32, packed mask bits, or f64 nanometres. Little-endian.
Bytes encode_challenge(const Challenge& c);
Challenge decode_challenge(std::span<const std::uint8_t> blob);

/// Challenge file: "PUFC" magic, version u16, then the challenge blob.
Bytes challenge_file(const Challenge& c);
Challenge read_challenge_file(std::span<const std::uint8_t> data);

/// Raw response: N1 x N2 intensities quantized to `bit_depth` bits.
class SpeckleImage {
 public:
  SpeckleImage() = default;
  SpeckleImage(std::uint32_t rows, std::uint32_t cols, int bit_depth = 8);
  SpeckleImage(std::uint32_t rows, std::uint32_t cols, std::vector<std::uint16_t> pixels,
               int bit_depth = 8);

  std::uint32_t rows() const { return rows_; }
  std::uint32_t cols() const { return cols_; }
  Dims dims() const { return {rows_, cols_}; }
  int bit_depth() const { return bit_depth_; }
  std::uint32_t max_value() const { return (1U << bit_depth_) - 1; }
  std::size_t size() const { return pixels_.size(); }

  std::uint16_t at(std::uint32_t r, std::uint32_t c) const {
    return pixels_[static_cast<std::size_t>(r) * cols_ + c];
  }
  std::span<const std::uint16_t> pixels() const { return pixels_; }
  std::span<std::uint16_t> pixels() { return pixels_; }

  bool operator==(const SpeckleImage&) const = default;

 private:
  std::uint32_t rows_ = 0;
  std::uint32_t cols_ = 0;
  int bit_depth_ = 8;
  std::vector<std::uint16_t> pixels_;
};

}  // namespace photopuf::sim
