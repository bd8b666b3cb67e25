#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "photopuf/bch/bch.hpp"
#include "photopuf/eval/metrics.hpp"
#include "photopuf/hashing/hashing.hpp"
#include "photopuf/sim/token.hpp"

namespace photopuf::eval {

enum class CampaignKind { robustness, unpredictability, unclonability };

const char* to_string(CampaignKind kind);
CampaignKind parse_campaign_kind(const std::string& text);

/// One of the three datasets.
///  robustness: token_seeds[0] x challenges[0], `repeats` noisy captures,
///    all pairs compared;
///  unpredictability: token_seeds[0], reference challenges[0] against every
///    other challenge;
///  unclonability: challenges[0], reference token_seeds[0] against every
///    other token.
struct Campaign {
  CampaignKind kind = CampaignKind::robustness;
  sim::TokenKind token_kind = sim::TokenKind::diffuser;
  sim::Dims grid{16, 16};
  sim::Dims out{128, 128};
  std::optional<double> decorrelation_pm;
  std::vector<std::uint64_t> token_seeds;
  std::vector<sim::Challenge> challenges;
  sim::NoiseParams noise;
  sim::Camera camera;
  std::size_t repeats = 60;
  /// Upper bound on compared pairs; larger sets are subsampled uniformly.
  std::size_t max_pairs = 100000;
  std::uint64_t sample_seed = 0;

  void validate() const;
};

struct CampaignResult {
  DistanceReport ed;
  DistanceReport cc;
  std::optional<DistanceReport> hd;  // fractional Hamming distance
};

/// Captures the dataset and evaluates ED, CC and (with a hash helper) HD.
/// The same helper hashes every image.
CampaignResult run_campaign(const Campaign& campaign,
                            const std::optional<hashing::HashHelper>& helper = std::nullopt);

/// Captures only, in comparison order (reference first for the
/// reference-vs-member kinds).
std::vector<sim::SpeckleImage> capture_campaign(const Campaign& campaign);

/// Index pairs compared by the campaign for `n` captures.
std::vector<std::pair<std::size_t, std::size_t>> campaign_pairs(const Campaign& campaign,
                                                                std::size_t n);

// ---------------------------------------------------------------------------

struct SuccessCurve {
  std::vector<std::size_t> t;
  std::vector<double> probability;
  std::size_t pairs = 0;

  /// Smallest t whose probability reaches `level`, if any.
  std::optional<std::size_t> first_reaching(double level) const;
};

/// Pr[HD(enroll_i, auth_i) <= t] for t = 0..t_max.
SuccessCurve success_curve(std::span<const BitKey> enrolled, std::span<const BitKey> authenticated,
                           std::size_t t_max);

/// Pr[K_A = K_E] through the actual fuzzy commitment for every t in
/// `t_values` with BCH(2^m - 1, t). Secrets are drawn from `seed`.
SuccessCurve decoded_success_curve(std::span<const BitKey> enrolled,
                                   std::span<const BitKey> authenticated, int m,
                                   std::span<const std::size_t> t_values, std::uint64_t seed);

void write_curve_tsv(std::ostream& os, const SuccessCurve& curve);

}  // namespace photopuf::eval
