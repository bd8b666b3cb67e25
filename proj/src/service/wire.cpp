#include "photopuf/service/wire.hpp"

#include "photopuf/common/errors.hpp"

namespace photopuf::service {

namespace {

template <std::size_t N>
std::array<std::uint8_t, N> fixed(ByteReader& r) {
  std::array<std::uint8_t, N> a{};
  const auto s = r.raw(N);
  std::copy(s.begin(), s.end(), a.begin());
  return a;
}

[[noreturn]] void malformed(const std::string& what) {
  throw FormatError(FormatError::Kind::malformed, "wire: " + what);
}

struct Encoder {
  ByteWriter& w;

  void operator()(const EnrollRequest& m) {
    w.u8(static_cast<std::uint8_t>(Opcode::enroll));
    w.raw(m.token_id);
    const auto blob = sim::encode_challenge(m.challenge);
    w.u32be(static_cast<std::uint32_t>(blob.size()));
    w.raw(blob);
  }
  void operator()(const AuthRequest& m) {
    w.u8(static_cast<std::uint8_t>(Opcode::auth));
    w.raw(m.record_id);
  }
  void operator()(const RandomRequest& m) {
    w.u8(static_cast<std::uint8_t>(Opcode::random));
    w.u32be(m.bits);
  }
  void operator()(const EnrollResult& m) {
    w.u8(static_cast<std::uint8_t>(Opcode::result));
    w.u8(static_cast<std::uint8_t>(Opcode::enroll));
    w.raw(m.record_id);
    w.raw(m.key_digest);
  }
  void operator()(const AuthResult& m) {
    w.u8(static_cast<std::uint8_t>(Opcode::result));
    w.u8(static_cast<std::uint8_t>(Opcode::auth));
    w.u8(m.accepted ? 1 : 0);
    w.u32be(m.corrected);
  }
  void operator()(const RandomResult& m) {
    w.u8(static_cast<std::uint8_t>(Opcode::result));
    w.u8(static_cast<std::uint8_t>(Opcode::random));
    w.u32be(static_cast<std::uint32_t>(m.bits.size()));
    w.raw(m.bits.packed());
  }
  void operator()(const ErrorReply& m) {
    w.u8(static_cast<std::uint8_t>(Opcode::error));
    w.u8(static_cast<std::uint8_t>(m.code));
    const auto len = std::min<std::size_t>(m.message.size(), 0xFFFF);
    w.u16be(static_cast<std::uint16_t>(len));
    w.raw(std::string_view(m.message).substr(0, len));
  }
};

Message read_result(ByteReader& r) {
  const auto kind = static_cast<Opcode>(r.u8());
  switch (kind) {
    case Opcode::enroll: {
      EnrollResult m;
      m.record_id = fixed<16>(r);
      m.key_digest = fixed<32>(r);
      return m;
    }
    case Opcode::auth: {
      AuthResult m;
      const auto a = r.u8();
      if (a > 1) malformed("bad verdict byte");
      m.accepted = a == 1;
      m.corrected = r.u32be();
      return m;
    }
    case Opcode::random: {
      const auto n = r.u32be();
      if (n > kMaxPayload * 8ULL) malformed("random result too long");
      return RandomResult{BitKey::from_packed(r.raw((n + 7) / 8), n)};
    }
    default: malformed("unknown result kind");
  }
}

}  // namespace

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::not_found: return "not_found";
    case ErrorCode::bad_frame: return "bad_frame";
    case ErrorCode::internal: return "internal";
    case ErrorCode::unknown_opcode: return "unknown_opcode";
    case ErrorCode::bad_request: return "bad_request";
  }
  return "unknown";
}

Bytes encode_payload(const Message& msg) {
  ByteWriter w;
  std::visit(Encoder{w}, msg);
  return std::move(w).bytes();
}

bool payload_opcode_known(std::span<const std::uint8_t> payload) {
  return !payload.empty() && payload[0] >= 0x01 && payload[0] <= 0x05;
}

Message decode_payload(std::span<const std::uint8_t> payload) {
  ByteReader r(payload);
  const auto op = r.u8();
  Message m;
  switch (static_cast<Opcode>(op)) {
    case Opcode::enroll: {
      EnrollRequest e;
      e.token_id = fixed<16>(r);
      const auto n = r.u32be();
      e.challenge = sim::decode_challenge(r.raw(n));
      m = std::move(e);
      break;
    }
    case Opcode::auth: m = AuthRequest{fixed<16>(r)}; break;
    case Opcode::random: m = RandomRequest{r.u32be()}; break;
    case Opcode::result: m = read_result(r); break;
    case Opcode::error: {
      ErrorReply e;
      const auto c = r.u8();
      if (c < 1 || c > 5) malformed("unknown error code");
      e.code = static_cast<ErrorCode>(c);
      const auto len = r.u16be();
      const auto s = r.raw(len);
      e.message.assign(s.begin(), s.end());
      m = std::move(e);
      break;
    }
    default: malformed("unknown opcode " + std::to_string(op));
  }
  if (!r.at_end()) malformed("trailing bytes in payload");
  return m;
}

Bytes frame(std::span<const std::uint8_t> payload) {
  if (payload.size() > kMaxPayload) throw InvalidArgument("wire: payload too large");
  ByteWriter w;
  w.u32be(static_cast<std::uint32_t>(payload.size()));
  w.raw(payload);
  return std::move(w).bytes();
}

Bytes encode_frame(const Message& msg) { return frame(encode_payload(msg)); }

Message decode_frame(std::span<const std::uint8_t> data) {
  ByteReader r(data);
  const auto len = r.u32be();
  if (len != r.remaining())
    throw FormatError(len > r.remaining() ? FormatError::Kind::truncated : FormatError::Kind::malformed,
                      "wire: length prefix does not match frame size");
  return decode_payload(r.raw(len));
}

}  // namespace photopuf::service
