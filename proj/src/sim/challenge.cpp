#include <algorithm>
#include <charconv>

#include "photopuf/common/bitkey.hpp"
#include "photopuf/common/errors.hpp"
#include "photopuf/common/random.hpp"
#include "photopuf/sim/types.hpp"

namespace photopuf::sim {

Dims parse_dims(const std::string& text) {
  const auto x = text.find_first_of("xX");
  if (x == std::string::npos) throw InvalidArgument("dimensions must look like RxC: " + text);
  Dims d;
  auto parse = [&](std::string_view s, std::uint32_t& out) {
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc() || p != s.data() + s.size()) {
      throw InvalidArgument("bad dimension: " + text);
    }
  };
  parse(std::string_view(text).substr(0, x), d.rows);
  parse(std::string_view(text).substr(x + 1), d.cols);
  return d;
}

std::string to_string(Dims d) { return std::to_string(d.rows) + "x" + std::to_string(d.cols); }

PixelPattern::PixelPattern(Dims dims, std::vector<std::uint8_t> mask)
    : dims_(dims), mask_(std::move(mask)) {
  if (mask_.size() != dims_.count()) {
    throw InvalidArgument("pattern mask size does not match its dimensions");
  }
  for (auto& m : mask_) m = m ? 1 : 0;
}

std::size_t PixelPattern::count_on() const {
  return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), 1));
}

PixelPattern PixelPattern::operator|(const PixelPattern& other) const {
  if (other.dims_ != dims_) throw InvalidArgument("pattern union: dimension mismatch");
  std::vector<std::uint8_t> m(mask_.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = mask_[i] | other.mask_[i];
  return PixelPattern(dims_, std::move(m));
}

PixelPattern random_pattern(Dims grid, std::uint64_t seed, double density) {
  if (grid.count() == 0) throw InvalidArgument("challenge grid must be non-empty");
  if (!(density > 0.0 && density <= 1.0)) throw InvalidArgument("density must be in (0, 1]");
  Rng rng(derive_seed({seed, 0x5041545445524EULL, grid.rows, grid.cols}));
  std::vector<std::uint8_t> mask(grid.count());
  do {
    for (auto& m : mask) m = rng.uniform01() < density ? 1 : 0;
  } while (std::find(mask.begin(), mask.end(), 1) == mask.end());
  return PixelPattern(grid, std::move(mask));
}

PixelPattern fixed_weight_pattern(Dims grid, std::size_t weight, std::uint64_t seed) {
  if (weight == 0 || weight > grid.count()) {
    throw InvalidArgument("pattern weight must be in [1, grid size]");
  }
  Rng rng(derive_seed({seed, 0x5745494748ULL, grid.rows, grid.cols}));
  std::vector<std::uint8_t> mask(grid.count(), 0);
  for (auto i : sample_without_replacement(rng, static_cast<std::uint32_t>(grid.count()),
                                           static_cast<std::uint32_t>(weight))) {
    mask[i] = 1;
  }
  return PixelPattern(grid, std::move(mask));
}

PixelPattern enumerated_pattern(Dims grid, std::uint64_t index) {
  if (grid.count() == 0 || grid.count() > 64) {
    throw InvalidArgument("enumerated patterns need a grid of 1..64 pixels");
  }
  std::vector<std::uint8_t> mask(grid.count());
  for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = (index >> i) & 1;
  return PixelPattern(grid, std::move(mask));
}

Bytes encode_challenge(const Challenge& c) {
  ByteWriter w;
  if (const auto* p = std::get_if<PixelPattern>(&c)) {
    w.u8(0);
    w.u32le(p->dims().rows);
    w.u32le(p->dims().cols);
    BitKey bits(std::vector<std::uint8_t>(p->mask().begin(), p->mask().end()));
    w.raw(bits.packed());
  } else {
    w.u8(1);
    w.f64le(std::get<Wavelength>(c).nm);
  }
  return std::move(w).bytes();
}

namespace {

Challenge read_challenge(ByteReader& r) {
  const auto type = r.u8();
  if (type == 0) {
    Dims d{r.u32le(), r.u32le()};
    if (d.count() == 0 || d.count() > (1U << 24)) {
      throw FormatError(FormatError::Kind::malformed, "challenge: bad pattern dimensions");
    }
    const auto packed = r.raw((d.count() + 7) / 8);
    const auto bits = BitKey::from_packed(packed, d.count());
    return PixelPattern(d, std::vector<std::uint8_t>(bits.bits().begin(), bits.bits().end()));
  }
  if (type == 1) return Wavelength{r.f64le()};
  throw FormatError(FormatError::Kind::malformed, "challenge: unknown type " + std::to_string(type));
}

}  // namespace

Challenge decode_challenge(std::span<const std::uint8_t> blob) {
  ByteReader r(blob);
  auto c = read_challenge(r);
  if (!r.at_end()) throw FormatError(FormatError::Kind::malformed, "challenge: trailing bytes");
  return c;
}

Bytes challenge_file(const Challenge& c) {
  ByteWriter w;
  w.raw(std::string_view("PUFC"));
  w.u16le(1);
  w.raw(encode_challenge(c));
  return std::move(w).bytes();
}

Challenge read_challenge_file(std::span<const std::uint8_t> data) {
  ByteReader r(data);
  r.expect_magic("PUFC");
  const auto version = r.u16le();
  if (version != 1) {
    throw FormatError(FormatError::Kind::bad_version,
                      "challenge file: unsupported version " + std::to_string(version));
  }
  return decode_challenge(r.raw(r.remaining()));
}

SpeckleImage::SpeckleImage(std::uint32_t rows, std::uint32_t cols, int bit_depth)
    : SpeckleImage(rows, cols, std::vector<std::uint16_t>(static_cast<std::size_t>(rows) * cols),
                   bit_depth) {}

SpeckleImage::SpeckleImage(std::uint32_t rows, std::uint32_t cols,
                           std::vector<std::uint16_t> pixels, int bit_depth)
    : rows_(rows), cols_(cols), bit_depth_(bit_depth), pixels_(std::move(pixels)) {
  if (bit_depth < 1 || bit_depth > 16) throw InvalidArgument("bit depth must be in [1, 16]");
  if (pixels_.size() != static_cast<std::size_t>(rows) * cols) {
    throw InvalidArgument("pixel buffer does not match image dimensions");
  }
  const auto maxv = max_value();
  for (auto p : pixels_) {
    if (p > maxv) throw InvalidArgument("pixel exceeds bit depth");
  }
}

}  // namespace photopuf::sim
