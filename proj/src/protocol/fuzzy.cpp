#include "photopuf/protocol/fuzzy.hpp"

#include "photopuf/common/errors.hpp"
#include "photopuf/common/random.hpp"

namespace photopuf::protocol {

Digest256 key_digest(const BitKey& key, DigestAlgorithm algorithm) {
  if (algorithm != DigestAlgorithm::sha256) throw Unsupported("unknown digest algorithm");
  ByteWriter w;
  w.u32le(static_cast<std::uint32_t>(key.size()));
  w.raw(key.packed());
  return sha256(w.bytes());
}

Enrollment enroll_with_helper(const sim::SpeckleImage& image, const hashing::HashHelper& helper,
                              const bch::BchCode& code, std::uint64_t rng_seed,
                              const EnrollContext& context) {
  const auto n = static_cast<std::size_t>(code.length());
  if (hashing::output_bits(helper) != n) {
    throw InvalidArgument("hash length " + std::to_string(hashing::output_bits(helper)) +
                          " does not match code length " + std::to_string(n));
  }
  BitKey key = hashing::hash_with(image, helper);

  Rng rng(derive_seed({rng_seed, 0x5EC2E7}));
  BitKey secret(static_cast<std::size_t>(code.message_length()));
  for (std::size_t i = 0; i < secret.size(); ++i) secret.set(i, rng.bit());

  EnrollmentRecord rec;
  rec.token_id = context.token_id;
  rec.challenge = context.challenge;
  rec.helper = helper;
  rec.code = code;
  rec.code_offset = key ^ code.encode(secret);
  rec.key_digest = key_digest(key);

  ByteWriter idw;
  idw.raw(rec.token_id);
  idw.raw(sim::encode_challenge(rec.challenge));
  idw.raw(rec.code_offset.packed());
  idw.u64le(rng_seed);
  const auto h = sha256(idw.bytes());
  std::copy_n(h.begin(), rec.record_id.size(), rec.record_id.begin());

  return {std::move(key), std::move(rec)};
}

Enrollment enroll(const sim::SpeckleImage& image, const hashing::HashConfig& hash_cfg,
                  const bch::BchCode& code, std::uint64_t rng_seed,
                  const EnrollContext& context) {
  if (hash_cfg.output_bits != static_cast<std::size_t>(code.length())) {
    throw InvalidArgument("hash length " + std::to_string(hash_cfg.output_bits) +
                          " does not match code length " + std::to_string(code.length()));
  }
  auto [key, helper] = hashing::hash_enroll(image, hash_cfg);
  (void)key;
  return enroll_with_helper(image, helper, code, rng_seed, context);
}

std::optional<Authentication> reproduce(const BitKey& hashed, const EnrollmentRecord& record) {
  if (hashed.size() != record.code_offset.size())
    throw InvalidArgument("hash length does not match the record");
  const auto decoded = record.code.decode(hashed ^ record.code_offset);
  if (!decoded) return std::nullopt;
  return Authentication{record.code_offset ^ decoded->codeword, decoded->corrected};
}

std::optional<Authentication> authenticate(const sim::SpeckleImage& image,
                                           const EnrollmentRecord& record) {
  if (image.dims() != hashing::helper_dims(record.helper))
    throw InvalidArgument("image dims do not match the record's helper");
  return reproduce(hashing::hash_with(image, record.helper), record);
}

bool verify(const BitKey& key, const EnrollmentRecord& record) {
  return key_digest(key, record.digest_algorithm) == record.key_digest;
}

std::string to_hex(const RecordId& id) { return photopuf::to_hex(id); }

}  // namespace photopuf::protocol
