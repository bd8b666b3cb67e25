#include "photopuf/sim/pgm.hpp"

#include <cctype>

#include "photopuf/common/errors.hpp"

namespace photopuf::sim {

Bytes encode_pgm(const SpeckleImage& image) {
  if (image.bit_depth() != 8) throw InvalidArgument("PGM export requires an 8-bit image");
  ByteWriter w;
  w.raw("P5\n" + std::to_string(image.cols()) + " " + std::to_string(image.rows()) + "\n255\n");
  for (auto p : image.pixels()) w.u8(static_cast<std::uint8_t>(p));
  return std::move(w).bytes();
}

namespace {

class HeaderParser {
 public:
  explicit HeaderParser(std::span<const std::uint8_t> data) : data_(data) {}

  unsigned long next_number() {
    skip_space_and_comments();
    if (pos_ >= data_.size() || !std::isdigit(data_[pos_])) {
      throw FormatError(FormatError::Kind::malformed, "PGM: expected a number in header");
    }
    unsigned long v = 0;
    while (pos_ < data_.size() && std::isdigit(data_[pos_])) {
      v = v * 10 + (data_[pos_++] - '0');
      if (v > (1UL << 24)) throw FormatError(FormatError::Kind::malformed, "PGM: value too large");
    }
    return v;
  }

  /// Exactly one whitespace byte separates maxval from the raster.
  std::size_t raster_start() {
    if (pos_ >= data_.size() || !std::isspace(data_[pos_])) {
      throw FormatError(FormatError::Kind::malformed, "PGM: missing raster separator");
    }
    return pos_ + 1;
  }

  std::size_t pos_ = 2;

 private:
  void skip_space_and_comments() {
    while (pos_ < data_.size()) {
      if (std::isspace(data_[pos_])) {
        ++pos_;
      } else if (data_[pos_] == '#') {
        while (pos_ < data_.size() && data_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> data_;
};

}  // namespace

SpeckleImage decode_pgm(std::span<const std::uint8_t> data) {
  if (data.size() < 2 || data[0] != 'P' || data[1] != '5') {
    throw FormatError(FormatError::Kind::bad_magic, "PGM: expected P5 magic");
  }
  HeaderParser hp(data);
  const auto cols = hp.next_number();
  const auto rows = hp.next_number();
  const auto maxval = hp.next_number();
  if (cols == 0 || rows == 0) throw FormatError(FormatError::Kind::malformed, "PGM: empty image");
  if (maxval == 0 || maxval > 255) {
    throw FormatError(FormatError::Kind::malformed, "PGM: only maxval 1..255 is supported");
  }
  const std::size_t start = hp.raster_start();
  const std::size_t count = cols * rows;
  if (data.size() - start < count) throw FormatError(FormatError::Kind::truncated, "PGM: truncated raster");
  std::vector<std::uint16_t> px(count);
  for (std::size_t i = 0; i < count; ++i) {
    px[i] = data[start + i];
    if (px[i] > maxval) throw FormatError(FormatError::Kind::malformed, "PGM: sample above maxval");
  }
  return SpeckleImage(static_cast<std::uint32_t>(rows), static_cast<std::uint32_t>(cols),
                      std::move(px), 8);
}

void save_pgm(const SpeckleImage& image, const std::string& path) {
  write_file(path, encode_pgm(image));
}

SpeckleImage load_pgm(const std::string& path) { return decode_pgm(read_file(path)); }

}  // namespace photopuf::sim
