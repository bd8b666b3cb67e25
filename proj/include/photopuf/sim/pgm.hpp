#pragma once

#include <span>
#include <string>

#include "photopuf/common/bytes.hpp"
#include "photopuf/sim/types.hpp"

namespace photopuf::sim {

/// Binary PGM (P5) with maxval 255. Only 8-bit images can be exported.
Bytes encode_pgm(const SpeckleImage& image);

/// Accepts P5 with comments and maxval in [1, 255].
SpeckleImage decode_pgm(std::span<const std::uint8_t> data);

void save_pgm(const SpeckleImage& image, const std::string& path);
SpeckleImage load_pgm(const std::string& path);

}  // namespace photopuf::sim
