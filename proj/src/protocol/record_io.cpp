#include "photopuf/common/errors.hpp"
#include "photopuf/protocol/fuzzy.hpp"

// Layout (little-endian):
//   "PUFR" | version u16 | record_id[16] | token_id[16]
//   | challenge blob (u32 length + bytes) | helper blob (u32 length + bytes)
//   | bch blob (u32 length + bytes) | code offset (u32 bits + packed)
//   | digest algorithm u8 | digest[32]

namespace photopuf::protocol {

namespace {

constexpr std::uint16_t kRecordVersion = 1;

void blob(ByteWriter& w, std::span<const std::uint8_t> b) {
  w.u32le(static_cast<std::uint32_t>(b.size()));
  w.raw(b);
}

std::span<const std::uint8_t> blob(ByteReader& r) {
  const auto n = r.u32le();
  return r.raw(n);
}

template <std::size_t N>
void copy_into(std::array<std::uint8_t, N>& dst, std::span<const std::uint8_t> src) {
  std::copy(src.begin(), src.end(), dst.begin());
}

}  // namespace

Bytes encode_record(const EnrollmentRecord& rec) {
  ByteWriter w;
  w.raw(std::string_view("PUFR"));
  w.u16le(kRecordVersion);
  w.raw(rec.record_id);
  w.raw(rec.token_id);
  blob(w, sim::encode_challenge(rec.challenge));
  blob(w, hashing::encode_helper(rec.helper));
  blob(w, rec.code.serialize());
  w.u32le(static_cast<std::uint32_t>(rec.code_offset.size()));
  w.raw(rec.code_offset.packed());
  w.u8(static_cast<std::uint8_t>(rec.digest_algorithm));
  w.raw(rec.key_digest);
  return std::move(w).bytes();
}

EnrollmentRecord decode_record(std::span<const std::uint8_t> data) {
  ByteReader r(data);
  r.expect_magic("PUFR");
  const auto version = r.u16le();
  if (version != kRecordVersion) {
    throw FormatError(FormatError::Kind::bad_version,
                      "record: unsupported version " + std::to_string(version));
  }
  EnrollmentRecord rec;
  copy_into(rec.record_id, r.raw(16));
  copy_into(rec.token_id, r.raw(16));
  rec.challenge = sim::decode_challenge(blob(r));
  rec.helper = hashing::decode_helper(blob(r));
  rec.code = bch::BchCode::deserialize(blob(r));
  const auto bits = r.u32le();
  if (bits != static_cast<std::uint32_t>(rec.code.length()))
    throw FormatError(FormatError::Kind::malformed, "record: code offset length mismatch");
  rec.code_offset = BitKey::from_packed(r.raw((bits + 7) / 8), bits);
  const auto algo = r.u8();
  if (algo != static_cast<std::uint8_t>(DigestAlgorithm::sha256))
    throw FormatError(FormatError::Kind::malformed, "record: unknown digest algorithm");
  rec.digest_algorithm = DigestAlgorithm::sha256;
  copy_into(rec.key_digest, r.raw(32));
  if (!r.at_end()) throw FormatError(FormatError::Kind::malformed, "record: trailing bytes");
  if (hashing::output_bits(rec.helper) != rec.code_offset.size())
    throw FormatError(FormatError::Kind::malformed, "record: helper length mismatch");
  return rec;
}

void save_record(const std::string& path, const EnrollmentRecord& record) {
  write_file(path, encode_record(record));
}

EnrollmentRecord load_record(const std::string& path) { return decode_record(read_file(path)); }

}  // namespace photopuf::protocol
