#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace photopuf {

using Digest256 = std::array<std::uint8_t, 32>;

Digest256 sha256(std::span<const std::uint8_t> data);

}  // namespace photopuf
