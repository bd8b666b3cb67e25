#include "photopuf/common/errors.hpp"
#include "photopuf/hashing/hashing.hpp"

namespace photopuf::hashing {

namespace {

constexpr std::uint16_t kHelperVersion = 1;

}  // namespace

std::pair<BitKey, HashHelper> hash_enroll(const sim::SpeckleImage& image, const HashConfig& cfg) {
  if (cfg.algorithm == HashConfig::Algorithm::rbm) {
    auto [key, helper] = rbm_enroll(image, cfg.output_bits, cfg.seed);
    return {std::move(key), HashHelper{std::move(helper)}};
  }
  auto [key, helper] = svd_enroll(image, cfg.output_bits, cfg.svd, cfg.seed);
  return {std::move(key), HashHelper{std::move(helper)}};
}

BitKey hash_with(const sim::SpeckleImage& image, const HashHelper& helper) {
  return std::visit(
      [&](const auto& h) -> BitKey {
        if constexpr (std::is_same_v<std::decay_t<decltype(h)>, RbmHelper>)
          return rbm_hash(image, h);
        else
          return svd_hash(image, h);
      },
      helper);
}

std::size_t output_bits(const HashHelper& helper) {
  return std::visit([](const auto& h) { return h.output_bits(); }, helper);
}

sim::Dims helper_dims(const HashHelper& helper) {
  return std::visit([](const auto& h) { return h.dims; }, helper);
}

Bytes encode_helper(const HashHelper& helper) {
  ByteWriter w;
  w.raw(std::string_view("PUFH"));
  w.u16le(kHelperVersion);
  if (const auto* rbm = std::get_if<RbmHelper>(&helper)) {
    w.u8(0);
    w.u32le(static_cast<std::uint32_t>(rbm->indices.size()));
    w.u32le(rbm->dims.rows);
    w.u32le(rbm->dims.cols);
    BitKey signs(rbm->signs.size());
    for (std::size_t i = 0; i < rbm->signs.size(); ++i) signs.set(i, rbm->signs[i] > 0);
    w.raw(signs.packed());
    for (auto i : rbm->indices) w.u32le(i);
  } else {
    const auto& svd = std::get<SvdHelper>(helper);
    w.u8(1);
    w.u32le(static_cast<std::uint32_t>(svd.indices.size()));
    w.u32le(svd.dims.rows);
    w.u32le(svd.dims.cols);
    w.u32le(svd.k1);
    w.u32le(svd.k2);
    w.u32le(static_cast<std::uint32_t>(svd.stage1.size()));
    w.u32le(static_cast<std::uint32_t>(svd.stage2.size()));
    for (const auto& b : svd.stage1) {
      w.u32le(b.row);
      w.u32le(b.col);
    }
    for (const auto& b : svd.stage2) {
      w.u32le(b.row);
      w.u32le(b.col);
    }
    for (auto i : svd.indices) w.u32le(i);
  }
  return std::move(w).bytes();
}

HashHelper read_helper(ByteReader& r) {
  r.expect_magic("PUFH");
  const auto version = r.u16le();
  if (version != kHelperVersion)
    throw FormatError(FormatError::Kind::bad_version,
                      "helper: unsupported version " + std::to_string(version));
  const auto algo = r.u8();
  const std::uint32_t m = r.u32le();
  sim::Dims dims{r.u32le(), r.u32le()};
  const auto remaining_u32 = [&r] { return r.remaining() / 4; };
  try {
    if (algo == 0) {
      const std::size_t n = dims.count();
      if (n == 0 || n > (std::size_t{1} << 32))
        throw FormatError(FormatError::Kind::malformed, "helper: bad dims");
      const auto packed = r.raw((n + 7) / 8);
      const auto bits = BitKey::from_packed(packed, n);
      RbmHelper h;
      h.dims = dims;
      h.signs.resize(n);
      for (std::size_t i = 0; i < n; ++i) h.signs[i] = bits[i] ? 1 : -1;
      if (m > remaining_u32()) throw FormatError(FormatError::Kind::truncated, "helper: truncated");
      h.indices.resize(m);
      for (auto& i : h.indices) i = r.u32le();
      h.validate();
      return h;
    }
    if (algo == 1) {
      SvdHelper h;
      h.dims = dims;
      h.k1 = r.u32le();
      h.k2 = r.u32le();
      const std::uint32_t p = r.u32le();
      const std::uint32_t rr = r.u32le();
      if (static_cast<std::uint64_t>(p) + rr + m > remaining_u32())
        throw FormatError(FormatError::Kind::truncated, "helper: truncated");
      h.stage1.resize(p);
      for (auto& b : h.stage1) b = {r.u32le(), r.u32le()};
      h.stage2.resize(rr);
      for (auto& b : h.stage2) b = {r.u32le(), r.u32le()};
      h.indices.resize(m);
      for (auto& i : h.indices) i = r.u32le();
      h.validate();
      return h;
    }
  } catch (const InvalidArgument& e) {
    throw FormatError(FormatError::Kind::malformed, std::string("helper: ") + e.what());
  }
  throw FormatError(FormatError::Kind::malformed,
                    "helper: unknown algorithm " + std::to_string(algo));
}

HashHelper decode_helper(std::span<const std::uint8_t> data) {
  ByteReader r(data);
  auto h = read_helper(r);
  if (!r.at_end()) throw FormatError(FormatError::Kind::malformed, "helper: trailing bytes");
  return h;
}

}  // namespace photopuf::hashing
