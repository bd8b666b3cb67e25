#pragma once

#include <atomic>
#include <map>
#include <memory>
#include <mutex>

#include "photopuf/bch/bch.hpp"
#include "photopuf/common/random.hpp"
#include "photopuf/hashing/hashing.hpp"
#include "photopuf/service/record_store.hpp"
#include "photopuf/service/wire.hpp"
#include "photopuf/sim/token.hpp"

namespace photopuf::service {

struct DeviceConfig {
  hashing::HashConfig hash;  // output_bits must equal the code length
  int bch_m = 8;
  int bch_t = 31;
  sim::NoiseParams noise = sim::NoiseParams::defaults();
  sim::Camera camera;
  /// Upper bound for one RANDOM request.
  std::uint32_t max_random_bits = 1U << 20;
  std::uint64_t seed = 1;
};

/// Prover side of the service: owns the simulated tokens and the record
/// store, turns requests into replies. Thread-safe.
class Device {
 public:
  Device(DeviceConfig config, std::shared_ptr<RecordStore> store);

  void add_token(sim::TokenModel token);
  std::vector<sim::TokenId> token_ids() const;

  /// Never throws; failures become ErrorReply.
  Message handle(const Message& request);

  /// Decodes a payload and handles it, mapping decode failures to
  /// unknown_opcode / bad_frame errors.
  Message handle_payload(std::span<const std::uint8_t> payload);

  const bch::BchCode& code() const { return code_; }
  const DeviceConfig& config() const { return config_; }

 private:
  struct Slot {
    sim::TokenModel token;
    std::mutex enroll_mutex;
    explicit Slot(sim::TokenModel t) : token(std::move(t)) {}
  };

  Message enroll(const EnrollRequest& req);
  Message auth(const AuthRequest& req);
  Message random(const RandomRequest& req);
  std::shared_ptr<Slot> find(const sim::TokenId& id) const;
  std::uint64_t next_nonce() { return derive_seed({config_.seed, counter_.fetch_add(1)}); }

  DeviceConfig config_;
  bch::BchCode code_;
  std::shared_ptr<RecordStore> store_;
  mutable std::mutex tokens_mutex_;
  std::map<sim::TokenId, std::shared_ptr<Slot>> tokens_;
  std::atomic<std::uint64_t> counter_{0};
};

}  // namespace photopuf::service
