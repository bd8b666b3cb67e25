#include "photopuf/service/device.hpp"

#include "photopuf/common/errors.hpp"
#include "photopuf/common/random.hpp"
#include "photopuf/protocol/fuzzy.hpp"
#include "photopuf/randomness/randomness.hpp"

namespace photopuf::service {

Device::Device(DeviceConfig config, std::shared_ptr<RecordStore> store)
    : config_(std::move(config)),
      code_(bch::BchCode::create(config_.bch_m, config_.bch_t)),
      store_(std::move(store)) {
  if (config_.hash.output_bits != static_cast<std::size_t>(code_.length())) {
    throw InvalidArgument("device: hash length " + std::to_string(config_.hash.output_bits) +
                          " does not match code length " + std::to_string(code_.length()));
  }
  config_.noise.validate();
}

void Device::add_token(sim::TokenModel token) {
  std::lock_guard lock(tokens_mutex_);
  const auto id = token.id();
  tokens_[id] = std::make_shared<Slot>(std::move(token));
}

std::vector<sim::TokenId> Device::token_ids() const {
  std::lock_guard lock(tokens_mutex_);
  std::vector<sim::TokenId> ids;
  for (const auto& [id, slot] : tokens_) ids.push_back(id);
  return ids;
}

std::shared_ptr<Device::Slot> Device::find(const sim::TokenId& id) const {
  std::lock_guard lock(tokens_mutex_);
  const auto it = tokens_.find(id);
  return it == tokens_.end() ? nullptr : it->second;
}

Message Device::enroll(const EnrollRequest& req) {
  auto slot = find(req.token_id);
  if (!slot) return ErrorReply{ErrorCode::not_found, "unknown token"};
  if (const auto* p = std::get_if<sim::PixelPattern>(&req.challenge)) {
    if (p->dims() != slot->token.grid())
      return ErrorReply{ErrorCode::bad_request, "pattern does not match the token grid"};
  }
  std::lock_guard lock(slot->enroll_mutex);
  const auto nonce = next_nonce();
  const auto image = sim::respond(slot->token, req.challenge,
                                  config_.noise.with_seed(derive_seed({nonce, 1})), config_.camera);
  auto cfg = config_.hash;
  cfg.seed = derive_seed({nonce, 2});
  auto e = protocol::enroll(image, cfg, code_, derive_seed({nonce, 3}),
                            {req.token_id, req.challenge});
  store_->put(e.record);
  return EnrollResult{e.record.record_id, e.record.key_digest};
}

Message Device::auth(const AuthRequest& req) {
  const auto record = store_->get(req.record_id);
  if (!record) return ErrorReply{ErrorCode::not_found, "unknown record"};
  auto slot = find(record->token_id);
  if (!slot) return ErrorReply{ErrorCode::not_found, "record refers to an unknown token"};
  const auto image = sim::respond(slot->token, record->challenge,
                                  config_.noise.with_seed(next_nonce()), config_.camera);
  const auto a = protocol::authenticate(image, *record);
  if (!a || !protocol::verify(a->key, *record)) return AuthResult{false, 0};
  return AuthResult{true, static_cast<std::uint32_t>(a->corrected)};
}

Message Device::random(const RandomRequest& req) {
  if (req.bits == 0 || req.bits > config_.max_random_bits)
    return ErrorReply{ErrorCode::bad_request, "bit count out of range"};
  std::shared_ptr<Slot> slot;
  {
    std::lock_guard lock(tokens_mutex_);
    if (tokens_.empty()) return ErrorReply{ErrorCode::not_found, "no token installed"};
    slot = tokens_.begin()->second;
  }
  const auto& token = slot->token;
  const std::size_t per_image = randomness::bits_per_helper(token.out());
  std::vector<sim::SpeckleImage> images;
  for (std::size_t have = 0; have < req.bits; have += per_image) {
    const auto nonce = next_nonce();
    images.push_back(sim::respond(token, sim::random_pattern(token.grid(), nonce),
                                  config_.noise.with_seed(derive_seed({nonce, 1})), config_.camera));
  }
  auto bits = randomness::extract_bits(images, {per_image, next_nonce()});
  bits.resize(req.bits);
  return RandomResult{BitKey(std::move(bits))};
}

Message Device::handle(const Message& request) {
  try {
    if (const auto* e = std::get_if<EnrollRequest>(&request)) return enroll(*e);
    if (const auto* a = std::get_if<AuthRequest>(&request)) return auth(*a);
    if (const auto* r = std::get_if<RandomRequest>(&request)) return random(*r);
    return ErrorReply{ErrorCode::bad_request, "not a request"};
  } catch (const DegenerateInput& e) {
    return ErrorReply{ErrorCode::internal, e.what()};
  } catch (const std::exception& e) {
    return ErrorReply{ErrorCode::internal, e.what()};
  }
}

Message Device::handle_payload(std::span<const std::uint8_t> payload) {
  if (!payload_opcode_known(payload)) {
    return ErrorReply{payload.empty() ? ErrorCode::bad_frame : ErrorCode::unknown_opcode,
                      payload.empty() ? "empty payload"
                                      : "unknown opcode " + std::to_string(payload[0])};
  }
  Message msg;
  try {
    msg = decode_payload(payload);
  } catch (const std::exception& e) {
    return ErrorReply{ErrorCode::bad_frame, e.what()};
  }
  return handle(msg);
}

}  // namespace photopuf::service
