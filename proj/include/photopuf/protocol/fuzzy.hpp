#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include "photopuf/bch/bch.hpp"
#include "photopuf/common/bitkey.hpp"
#include "photopuf/common/digest.hpp"
#include "photopuf/hashing/hashing.hpp"
#include "photopuf/sim/token.hpp"

namespace photopuf::protocol {

using RecordId = std::array<std::uint8_t, 16>;

enum class DigestAlgorithm : std::uint8_t { sha256 = 1 };

/// Public enrollment data. Holds the helper data (hash helper and code
/// offset) and a digest of the enrolled key, never the key or the secret.
struct EnrollmentRecord {
  RecordId record_id{};
  sim::TokenId token_id{};
  sim::Challenge challenge = sim::Wavelength{sim::kTuningMinNm};
  hashing::HashHelper helper;
  bch::BchCode code = bch::BchCode::create(4, 1);
  BitKey code_offset;
  DigestAlgorithm digest_algorithm = DigestAlgorithm::sha256;
  Digest256 key_digest{};
};

/// Where the enrolled response came from. Stored in the record for lookup only.
struct EnrollContext {
  sim::TokenId token_id{};
  sim::Challenge challenge = sim::Wavelength{sim::kTuningMinNm};
};

struct Enrollment {
  BitKey key;  // K_E
  EnrollmentRecord record;
};

struct Authentication {
  BitKey key;  // K_A
  std::size_t corrected = 0;
};

/// Hashes the image, binds a fresh random secret drawn from `rng_seed` and
/// returns the key with its record. Throws InvalidArgument when the hash
/// length differs from the code length.
Enrollment enroll(const sim::SpeckleImage& image, const hashing::HashConfig& hash_cfg,
                  const bch::BchCode& code, std::uint64_t rng_seed,
                  const EnrollContext& context = {});

/// Enrollment with an existing hash helper.
Enrollment enroll_with_helper(const sim::SpeckleImage& image, const hashing::HashHelper& helper,
                              const bch::BchCode& code, std::uint64_t rng_seed,
                              const EnrollContext& context = {});

/// Fresh response -> K_A. nullopt means the code could not decode (reject).
std::optional<Authentication> authenticate(const sim::SpeckleImage& image,
                                           const EnrollmentRecord& record);

/// Same as authenticate, starting from an already computed hash K_A'.
std::optional<Authentication> reproduce(const BitKey& hashed, const EnrollmentRecord& record);

/// Accept iff the digest of `key` equals the stored digest.
bool verify(const BitKey& key, const EnrollmentRecord& record);

Digest256 key_digest(const BitKey& key, DigestAlgorithm algorithm = DigestAlgorithm::sha256);

/// "PUFR" record file, see record_io.cpp for the layout.
Bytes encode_record(const EnrollmentRecord& record);
EnrollmentRecord decode_record(std::span<const std::uint8_t> data);
void save_record(const std::string& path, const EnrollmentRecord& record);
EnrollmentRecord load_record(const std::string& path);

std::string to_hex(const RecordId& id);

}  // namespace photopuf::protocol
