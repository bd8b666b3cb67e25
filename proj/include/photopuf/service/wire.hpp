#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include "photopuf/common/bitkey.hpp"
#include "photopuf/common/bytes.hpp"
#include "photopuf/common/digest.hpp"
#include "photopuf/protocol/fuzzy.hpp"
#include "photopuf/sim/token.hpp"

namespace photopuf::service {

// Frame: u32 big-endian payload length, then the payload. The payload starts
// with the opcode; integers inside are big-endian, challenge blobs use the
// challenge encoding with a u32 length prefix.
//
//   ENROLL  01 | token_id[16] | challenge
//   AUTH    02 | record_id[16]
//   RANDOM  05 | bits u32
//   RESULT  03 | 01 | record_id[16] | key digest[32]        (enrolled)
//           03 | 02 | accepted u8 | corrected u32           (auth verdict)
//           03 | 05 | bits u32 | packed bits                (random)
//   ERROR   04 | code u8 | message length u16 | message

enum class Opcode : std::uint8_t {
  enroll = 0x01,
  auth = 0x02,
  result = 0x03,
  error = 0x04,
  random = 0x05,
};

enum class ErrorCode : std::uint8_t {
  not_found = 1,
  bad_frame = 2,
  internal = 3,
  unknown_opcode = 4,
  bad_request = 5,
};

const char* to_string(ErrorCode code);

struct EnrollRequest {
  sim::TokenId token_id{};
  sim::Challenge challenge;
  bool operator==(const EnrollRequest&) const = default;
};

struct AuthRequest {
  protocol::RecordId record_id{};
  bool operator==(const AuthRequest&) const = default;
};

struct RandomRequest {
  std::uint32_t bits = 0;
  bool operator==(const RandomRequest&) const = default;
};

struct EnrollResult {
  protocol::RecordId record_id{};
  Digest256 key_digest{};
  bool operator==(const EnrollResult&) const = default;
};

struct AuthResult {
  bool accepted = false;
  std::uint32_t corrected = 0;
  bool operator==(const AuthResult&) const = default;
};

struct RandomResult {
  BitKey bits;
  bool operator==(const RandomResult&) const = default;
};

struct ErrorReply {
  ErrorCode code = ErrorCode::internal;
  std::string message;
  bool operator==(const ErrorReply&) const = default;
};

using Message = std::variant<EnrollRequest, AuthRequest, RandomRequest, EnrollResult, AuthResult,
                             RandomResult, ErrorReply>;

inline constexpr std::uint32_t kMaxPayload = 16U << 20;

Bytes encode_payload(const Message& msg);
/// Throws FormatError (malformed or truncated). An unknown opcode is
/// reported as FormatError with kind malformed and the opcode in the message;
/// use `payload_opcode_known` to tell the two apart.
Message decode_payload(std::span<const std::uint8_t> payload);
bool payload_opcode_known(std::span<const std::uint8_t> payload);

Bytes frame(std::span<const std::uint8_t> payload);
Bytes encode_frame(const Message& msg);
/// Decodes exactly one frame occupying the whole buffer.
Message decode_frame(std::span<const std::uint8_t> data);

}  // namespace photopuf::service
