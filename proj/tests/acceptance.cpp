// Acceptance run: one PASS/FAIL line per criterion, followed by the measured
// values. Optional arguments select criteria by name (e.g. `acceptance C3 C8`).

#include <algorithm>
#include <array>
#include <optional>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "photopuf/bch/bch.hpp"
#include "photopuf/common/errors.hpp"
#include "photopuf/common/random.hpp"
#include "photopuf/eval/campaign.hpp"
#include "photopuf/eval/metrics.hpp"
#include "photopuf/hashing/hashing.hpp"
#include "photopuf/protocol/fuzzy.hpp"
#include "photopuf/randomness/randomness.hpp"
#include "photopuf/service/server.hpp"
#include "photopuf/sim/token.hpp"

using namespace photopuf;
using Clock = std::chrono::steady_clock;

namespace {

// Pinned tolerances.
namespace tol {
constexpr double c1_seconds = 60.0;
constexpr std::size_t c1_sampled_codewords[] = {65536, 16384, 1024};  // BCH(31, t = 1, 2, 3)

constexpr double c3_mean_target = 0.054;
constexpr double c3_mean_slack = 0.0054;  // 10 % of the target
constexpr double c3_std_target = 0.015;
constexpr double c3_std_slack = 0.003;  // 20 % of the target
constexpr double c3_level = 0.999;
constexpr std::size_t c3_t_target = 31;
constexpr std::size_t c3_t_slack = 4;
constexpr std::size_t c3_min_pairs = 1000;
constexpr double c3_seconds = 600.0;

constexpr std::size_t c4_t = 43;
constexpr std::size_t c4_trials = 10000;
constexpr double c4_rate = 1e-3;

constexpr double c5_hd_low = 0.45;
constexpr double c5_hd_high = 0.55;
constexpr std::size_t c5_min_pairs = 500;
constexpr double c5_marginal_slack = 0.05;

constexpr double c7_pof_max = 0.5;
constexpr double c7_diffuser_min = 0.8;
constexpr double c7_delta_pm = 100.0;
constexpr std::size_t c7_tokens = 50;
constexpr double c7_monotone_se = 3.0;  // allowed rise, in standard errors of the paired difference

constexpr double c8_off_max = 0.8;
constexpr double c8_off_at = 3.0;
constexpr double c8_on_min = 0.95;
constexpr int c8_t = 51;
constexpr std::size_t c8_frame = 512;

constexpr std::size_t c9_streams = 100;
constexpr std::size_t c9_bits = 20000;

constexpr double c10_ms = 100.0;
}  // namespace tol

struct Outcome {
  bool pass = false;
  std::vector<std::string> details;
};

class Line {
 public:
  template <class T>
  Line& operator()(const std::string& key, const T& value) {
    os_ << (first_ ? "" : " ") << key << '=' << value;
    first_ = false;
    return *this;
  }
  std::string str() const { return os_.str(); }

 private:
  std::ostringstream os_;
  bool first_ = true;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

BitKey bits_of(std::uint64_t value, std::size_t length) {
  BitKey k(length);
  for (std::size_t i = 0; i < length; ++i) k.set(i, (value >> i) & 1U);
  return k;
}

BitKey random_bits(Rng& rng, std::size_t length) {
  BitKey k(length);
  for (std::size_t i = 0; i < length; ++i) k.set(i, rng.bit());
  return k;
}

/// Calls f on every subset of {0..n-1} with at most `max_size` elements.
void for_each_subset(std::size_t n, std::size_t max_size,
                     const std::function<void(const std::vector<std::size_t>&)>& f) {
  std::vector<std::size_t> cur;
  std::function<void(std::size_t)> rec = [&](std::size_t from) {
    f(cur);
    if (cur.size() == max_size) return;
    for (std::size_t i = from; i < n; ++i) {
      cur.push_back(i);
      rec(i + 1);
      cur.pop_back();
    }
  };
  rec(0);
}

BitKey flipped(BitKey k, const std::vector<std::size_t>& positions) {
  for (auto p : positions) k.flip(p);
  return k;
}

std::vector<sim::Challenge> random_challenges(sim::Dims grid, std::size_t n, std::uint64_t seed) {
  std::vector<sim::Challenge> out;
  for (std::size_t i = 0; i < n; ++i) out.emplace_back(sim::random_pattern(grid, derive_seed({seed, i})));
  return out;
}

std::vector<double> hd_values(const std::vector<BitKey>& hashes,
                              const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  std::vector<double> v;
  v.reserve(pairs.size());
  for (auto [a, b] : pairs) v.push_back(fractional_hamming(hashes[a], hashes[b]));
  return v;
}

std::vector<BitKey> hash_all(const std::vector<sim::SpeckleImage>& images,
                             const hashing::HashHelper& helper) {
  std::vector<BitKey> out;
  out.reserve(images.size());
  for (const auto& im : images) out.push_back(hashing::hash_with(im, helper));
  return out;
}

// ---------------------------------------------------------------------------

Outcome bch_exhaustive() {
  Outcome o;
  const auto start = Clock::now();
  std::size_t failures = 0;
  for (int t = 1; t <= 3; ++t) {
    const auto code = bch::BchCode::create(4, t);
    const auto n = static_cast<std::size_t>(code.length());
    const auto k = static_cast<std::size_t>(code.message_length());
    std::vector<std::vector<std::size_t>> errors;
    for_each_subset(n, static_cast<std::size_t>(t), [&](const auto& s) { errors.push_back(s); });
    std::size_t decodes = 0;
    for (std::uint64_t msg = 0; msg < (1ULL << k); ++msg) {
      const auto message = bits_of(msg, k);
      const auto cw = code.encode(message);
      for (const auto& e : errors) {
        const auto d = code.decode(flipped(cw, e));
        if (!d || d->message != message) ++failures;
        ++decodes;
      }
    }
    o.details.push_back(Line()("code", "BCH(15," + std::to_string(k) + ")")("t", t)(
                            "codewords", 1ULL << k)("patterns", errors.size())("decodes", decodes)
                            .str());
  }
  for (int t = 1; t <= 3; ++t) {
    const auto code = bch::BchCode::create(5, t);
    const auto n = static_cast<std::size_t>(code.length());
    const auto k = static_cast<std::size_t>(code.message_length());
    std::vector<std::vector<std::size_t>> errors;
    for_each_subset(n, static_cast<std::size_t>(t), [&](const auto& s) { errors.push_back(s); });
    // The all-zero word, every unit message, then uniform random messages.
    std::vector<BitKey> messages{BitKey(k)};
    for (std::size_t i = 0; i < k; ++i) messages.push_back(bits_of(1ULL << i, k));
    Rng rng(derive_seed({0xBC, static_cast<std::uint64_t>(t)}));
    while (messages.size() < tol::c1_sampled_codewords[t - 1]) messages.push_back(random_bits(rng, k));
    std::size_t decodes = 0;
    for (const auto& message : messages) {
      const auto cw = code.encode(message);
      for (const auto& e : errors) {
        const auto d = code.decode(flipped(cw, e));
        if (!d || d->message != message) ++failures;
        ++decodes;
      }
    }
    o.details.push_back(Line()("code", "BCH(31," + std::to_string(k) + ")")("t", t)(
                            "codewords_checked", messages.size())("codewords_total", 1ULL << k)(
                            "patterns", errors.size())("decodes", decodes)
                            .str());
  }
  const double secs = seconds_since(start);
  o.details.insert(o.details.begin(),
                   Line()("failures", failures)("seconds", secs)("limit_s", tol::c1_seconds).str());
  o.pass = failures == 0 && secs < tol::c1_seconds;
  return o;
}

Outcome fuzzy_radius() {
  Outcome o;
  const auto code = bch::BchCode::create(4, 3);
  const auto token = sim::TokenModel::create(3, sim::TokenKind::diffuser, {8, 8}, {32, 32});
  const auto image = sim::respond(token, sim::random_pattern(token.grid(), 4));
  hashing::HashConfig cfg;
  cfg.output_bits = 15;
  cfg.seed = 5;

  std::set<std::string> secrets;
  std::size_t checked = 0;
  std::size_t mismatches = 0;
  std::size_t rejects = 0;
  for (std::uint64_t seed = 0; secrets.size() < (1U << code.message_length()) && seed < 10000; ++seed) {
    const auto e = protocol::enroll(image, cfg, code, seed);
    const auto secret = code.decode(e.record.code_offset ^ e.key)->message.to_string();
    if (!secrets.insert(secret).second) continue;
    const auto hashed = hashing::hash_with(image, e.record.helper);
    for_each_subset(15, 3, [&](const auto& s) {
      const auto a = protocol::reproduce(flipped(hashed, s), e.record);
      ++checked;
      if (!a) ++rejects;
      else if (a->key != e.key || !protocol::verify(a->key, e.record)) ++mismatches;
    });
  }
  o.details.push_back(Line()("secrets", secrets.size())("perturbations", checked)("rejects", rejects)(
                          "mismatches", mismatches)
                          .str());
  o.pass = secrets.size() == 32 && checked == 32 * 576 && rejects == 0 && mismatches == 0;
  return o;
}

// Enrollment/authentication pair sets for the threshold reproduction.
struct PairPlan {
  std::vector<sim::TokenModel> tokens;
  std::size_t challenges_per_token = 0;
  std::size_t auths = 0;
  std::uint64_t seed = 0;
};

struct PairHashes {
  std::vector<BitKey> enrolled;
  std::vector<BitKey> authenticated;
};

PairHashes run_pairs(const PairPlan& plan, const sim::NoiseParams& noise) {
  PairHashes out;
  for (std::size_t ti = 0; ti < plan.tokens.size(); ++ti) {
    const auto& tok = plan.tokens[ti];
    for (std::size_t ci = 0; ci < plan.challenges_per_token; ++ci) {
      const auto chal = sim::random_pattern(tok.grid(), derive_seed({plan.seed, ti, ci}));
      const auto base = derive_seed({plan.seed, ti, ci, 7});
      hashing::HashConfig cfg;
      cfg.seed = derive_seed({base, 0xA5});
      const auto [key, helper] =
          hashing::hash_enroll(sim::respond(tok, chal, noise.with_seed(derive_seed({base, 0}))), cfg);
      for (std::size_t j = 0; j < plan.auths; ++j) {
        out.enrolled.push_back(key);
        out.authenticated.push_back(
            hashing::hash_with(sim::respond(tok, chal, noise.with_seed(derive_seed({base, j + 1}))), helper));
      }
    }
  }
  return out;
}

std::vector<double> fractional(const PairHashes& p) {
  std::vector<double> v;
  for (std::size_t i = 0; i < p.enrolled.size(); ++i)
    v.push_back(fractional_hamming(p.enrolled[i], p.authenticated[i]));
  return v;
}

Outcome threshold_reproduction() {
  Outcome o;
  const auto start = Clock::now();
  auto noise = sim::NoiseParams::defaults();

  PairPlan calib;
  for (std::uint64_t s : {501, 502}) calib.tokens.push_back(sim::TokenModel::create(s, sim::TokenKind::diffuser));
  calib.challenges_per_token = 3;
  calib.auths = 12;
  calib.seed = 0xCA11;

  // Bisection on the baseline phase jitter for the target mean.
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < 10; ++it) {
    noise.phase_drift_sigma = 0.5 * (lo + hi);
    const double m = eval::mean(fractional(run_pairs(calib, noise)));
    (m < tol::c3_mean_target ? lo : hi) = noise.phase_drift_sigma;
  }
  noise.phase_drift_sigma = 0.5 * (lo + hi);
  o.details.push_back(Line()("calibrated_phase_drift", noise.phase_drift_sigma)(
                          "intensity_sigma", noise.intensity_sigma)("calibration_s", seconds_since(start))
                          .str());

  PairPlan plan;
  for (std::uint64_t s = 601; s < 605; ++s) plan.tokens.push_back(sim::TokenModel::create(s, sim::TokenKind::diffuser));
  plan.challenges_per_token = 5;
  plan.auths = 50;
  plan.seed = 0xE7A1;
  const auto pairs = run_pairs(plan, noise);
  const auto hd = fractional(pairs);
  const double mu = eval::mean(hd);
  const double sd = eval::stddev(hd);
  const auto curve = eval::success_curve(pairs.enrolled, pairs.authenticated, 255);
  const auto t_hit = curve.first_reaching(tol::c3_level);
  const auto t_one = curve.first_reaching(1.0);

  std::size_t decoded_ok = 0;
  if (t_hit) {
    const std::vector<std::size_t> ts{*t_hit};
    const auto dec = eval::decoded_success_curve(pairs.enrolled, pairs.authenticated, 8, ts, 0xDEC);
    decoded_ok = static_cast<std::size_t>(std::lround(dec.probability[0] * static_cast<double>(dec.pairs)));
  }
  const double secs = seconds_since(start);
  const double max_hd = *std::max_element(hd.begin(), hd.end());
  o.details.push_back(Line()("pairs", curve.pairs)("hd_mean", mu)("hd_std", sd)("hd_max_bits",
                                                                              std::lround(max_hd * 255))
                          .str());
  o.details.push_back(Line()("t_at_0.999", t_hit ? std::to_string(*t_hit) : "none")(
                          "t_at_1", t_one ? std::to_string(*t_one) : "none")("decoded_accepts_at_t",
                                                                               decoded_ok)(
                          "window", std::to_string(tol::c3_t_target - tol::c3_t_slack) + ".." +
                                        std::to_string(tol::c3_t_target + tol::c3_t_slack))(
                          "seconds", secs)
                          .str());
  const bool mean_ok = std::abs(mu - tol::c3_mean_target) <= tol::c3_mean_slack;
  const bool std_ok = std::abs(sd - tol::c3_std_target) <= tol::c3_std_slack;
  const bool t_ok = t_hit && *t_hit + tol::c3_t_slack >= tol::c3_t_target &&
                    *t_hit <= tol::c3_t_target + tol::c3_t_slack;
  o.pass = mean_ok && std_ok && t_ok && curve.pairs >= tol::c3_min_pairs && secs < tol::c3_seconds;
  return o;
}

Outcome collision_floor() {
  Outcome o;
  const auto code = bch::BchCode::create(8, static_cast<int>(tol::c4_t));
  const sim::Dims grid{8, 8};
  const sim::Dims out{32, 32};
  const auto noise = sim::NoiseParams::defaults();
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  for (std::size_t i = 0; i < tol::c4_trials; ++i) {
    const auto enrolled = sim::TokenModel::create(derive_seed({0xC4, i, 0}), sim::TokenKind::diffuser, grid, out);
    const auto other = sim::TokenModel::create(derive_seed({0xC4, i, 1}), sim::TokenKind::diffuser, grid, out);
    const auto chal = sim::random_pattern(grid, derive_seed({0xC4, i, 2}));
    hashing::HashConfig cfg;
    cfg.seed = derive_seed({0xC4, i, 3});
    const auto e = protocol::enroll(sim::respond(enrolled, chal, noise.with_seed(derive_seed({0xC4, i, 4}))),
                                    cfg, code, derive_seed({0xC4, i, 5}));
    const auto a = protocol::authenticate(sim::respond(other, chal, noise.with_seed(derive_seed({0xC4, i, 6}))),
                                          e.record);
    if (!a) ++rejected;
    else if (a->key == e.key) ++accepted;
  }
  const double rate = static_cast<double>(accepted) / static_cast<double>(tol::c4_trials);
  o.details.push_back(Line()("trials", tol::c4_trials)("k", code.message_length())("collisions", accepted)(
                          "decoder_rejects", rejected)("rate", rate)("limit", tol::c4_rate)("dims", "8x8->32x32")
                          .str());
  o.pass = rate < tol::c4_rate;
  return o;
}

Outcome rbm_statistics() {
  Outcome o;
  const sim::Dims grid{8, 8};
  const sim::Dims out{64, 64};
  const std::size_t responses = 4000;
  const auto chal = sim::random_pattern(grid, 0xC5);
  const auto helper = hashing::make_rbm_helper(out, 255, 0xC5);
  const auto noise = sim::NoiseParams::defaults();

  std::vector<BitKey> hashes;
  std::vector<double> ones(255, 0.0);
  for (std::size_t i = 0; i < responses; ++i) {
    const auto tok = sim::TokenModel::create(derive_seed({0xC5, i}), sim::TokenKind::diffuser, grid, out);
    hashes.push_back(hashing::rbm_hash(sim::respond(tok, chal, noise.with_seed(i)), helper));
    for (std::size_t b = 0; b < 255; ++b) ones[b] += hashes.back()[b];
  }
  std::vector<double> hd;
  for (std::size_t i = 0; i + 1 < responses; i += 2) hd.push_back(fractional_hamming(hashes[i], hashes[i + 1]));
  double worst_resp = 0.0;
  for (double c : ones) worst_resp = std::max(worst_resp, std::abs(c / responses - 0.5));

  // Marginals over helpers for one fixed response.
  const auto tok = sim::TokenModel::create(0xC5C5, sim::TokenKind::diffuser, grid, out);
  const auto image = sim::respond(tok, chal, noise);
  std::vector<double> ones_h(255, 0.0);
  for (std::size_t i = 0; i < responses; ++i) {
    const auto k = hashing::rbm_hash(image, hashing::make_rbm_helper(out, 255, derive_seed({0xC5, 0xFF, i})));
    for (std::size_t b = 0; b < 255; ++b) ones_h[b] += k[b];
  }
  double worst_helper = 0.0;
  for (double c : ones_h) worst_helper = std::max(worst_helper, std::abs(c / responses - 0.5));

  const double mu = eval::mean(hd);
  o.details.push_back(Line()("pairs", hd.size())("hd_mean", mu)("hd_std", eval::stddev(hd)).str());
  o.details.push_back(Line()("marginal_max_dev_over_responses", worst_resp)(
                          "marginal_max_dev_over_helpers", worst_helper)("samples", responses)(
                          "limit", tol::c5_marginal_slack)
                          .str());
  o.pass = hd.size() >= tol::c5_min_pairs && mu >= tol::c5_hd_low && mu <= tol::c5_hd_high &&
           worst_resp <= tol::c5_marginal_slack && worst_helper <= tol::c5_marginal_slack;
  return o;
}

struct HdSets {
  std::vector<double> rbm;
  std::vector<double> svd;
};

HdSets campaign_hds(const eval::Campaign& c, const hashing::HashHelper& rbm, const hashing::HashHelper& svd) {
  const auto images = eval::capture_campaign(c);
  const auto pairs = eval::campaign_pairs(c, images.size());
  return {hd_values(hash_all(images, rbm), pairs), hd_values(hash_all(images, svd), pairs)};
}

Outcome histogram_separation() {
  Outcome o;
  eval::Campaign rob;
  rob.token_seeds = {71};
  rob.challenges = random_challenges(rob.grid, 60, 0xC6);
  rob.noise = sim::NoiseParams::defaults();
  rob.noise.noise_seed = 0xC6;
  rob.repeats = 60;

  eval::Campaign unp = rob;
  unp.kind = eval::CampaignKind::unpredictability;

  eval::Campaign unc = rob;
  unc.kind = eval::CampaignKind::unclonability;
  unc.token_seeds.clear();
  for (std::uint64_t s = 71; s < 131; ++s) unc.token_seeds.push_back(s);

  const hashing::HashHelper rbm = hashing::make_rbm_helper(rob.out, 255, 0xC6);
  const hashing::HashHelper svd = hashing::make_svd_helper(rob.out, 255, {}, 0xC6);

  const auto r = campaign_hds(rob, rbm, svd);
  const auto p = campaign_hds(unp, rbm, svd);
  const auto u = campaign_hds(unc, rbm, svd);
  auto ov = [](const std::vector<double>& a, const std::vector<double>& b) {
    return eval::overlap(eval::make_report("hd", a), eval::make_report("hd", b));
  };
  const double rp = ov(r.rbm, p.rbm);
  const double ru = ov(r.rbm, u.rbm);
  o.details.push_back(Line()("defaults_rbm_rob_mean", eval::mean(r.rbm))("unp_mean", eval::mean(p.rbm))(
                          "unc_mean", eval::mean(u.rbm))("overlap_rob_unp", rp)("overlap_rob_unc", ru)
                          .str());
  o.details.push_back(Line()("defaults_svd_overlap_rob_unp", ov(r.svd, p.svd))("defaults_svd_overlap_rob_unc",
                                                                                 ov(r.svd, u.svd))
                          .str());

  // Smallest vibration level on the grid where RBM robustness meets unpredictability.
  std::optional<double> level;
  double rbm_ov = 0.0;
  double svd_ov = 0.0;
  for (double v : {0.1, 0.2, 0.3, 0.5, 0.75, 1.0, 1.5}) {
    eval::Campaign rv = rob;
    rv.noise.vibration_sigma = v;
    eval::Campaign pv = unp;
    pv.noise.vibration_sigma = v;
    const auto a = campaign_hds(rv, rbm, svd);
    const auto b = campaign_hds(pv, rbm, svd);
    rbm_ov = ov(a.rbm, b.rbm);
    svd_ov = ov(a.svd, b.svd);
    o.details.push_back(Line()("vibration", v)("rbm_overlap", rbm_ov)("svd_overlap", svd_ov)(
                            "rbm_rob_mean", eval::mean(a.rbm))("svd_rob_mean", eval::mean(a.svd))(
                            "svd_unp_mean", eval::mean(b.svd))
                            .str());
    if (rbm_ov > 0.0) {
      level = v;
      break;
    }
  }
  o.pass = rp == 0.0 && ru == 0.0 && level && rbm_ov > 0.0 && svd_ov == 0.0;
  return o;
}

Outcome wavelength_decorrelation() {
  Outcome o;
  const std::vector<double> deltas_pm{0, 20, 50, 100, 200, 500, 1000, 2000};
  const double base_nm = 1545.0;
  std::vector<double> lambdas;
  for (double d : deltas_pm) lambdas.push_back(base_nm + d / 1000.0);
  const auto noise = sim::NoiseParams::defaults();

  bool all_ok = true;
  for (auto kind : {sim::TokenKind::pof, sim::TokenKind::diffuser}) {
    std::vector<std::vector<double>> cc(deltas_pm.size());
    for (std::size_t i = 0; i < tol::c7_tokens; ++i) {
      const auto tok = sim::TokenModel::create(derive_seed({0xC7, i}), kind, {16, 16}, {128, 128});
      const auto images = sim::wavelength_sweep(tok, lambdas, noise.with_seed(derive_seed({0xC7, i, 1})));
      const auto ref = sim::wavelength_response(tok, base_nm, noise.with_seed(derive_seed({0xC7, i, 2})));
      for (std::size_t d = 0; d < deltas_pm.size(); ++d) cc[d].push_back(eval::cross_correlation(ref, images[d]));
    }
    std::vector<double> means;
    for (const auto& v : cc) means.push_back(eval::mean(v));
    bool monotone = true;
    double worst_rise = 0.0;
    for (std::size_t d = 1; d < deltas_pm.size(); ++d) {
      std::vector<double> diff;
      for (std::size_t i = 0; i < tol::c7_tokens; ++i) diff.push_back(cc[d][i] - cc[d - 1][i]);
      const double rise = eval::mean(diff);
      const double se = eval::stddev(diff) / std::sqrt(static_cast<double>(diff.size()));
      worst_rise = std::max(worst_rise, rise);
      if (rise > tol::c7_monotone_se * se) monotone = false;
    }
    const auto at = static_cast<std::size_t>(
        std::find(deltas_pm.begin(), deltas_pm.end(), tol::c7_delta_pm) - deltas_pm.begin());
    const bool level_ok = kind == sim::TokenKind::pof ? means[at] <= tol::c7_pof_max : means[at] >= tol::c7_diffuser_min;
    all_ok = all_ok && level_ok && monotone;
    Line l;
    l("kind", sim::to_string(kind))("tokens", tol::c7_tokens)("cc_at_100pm", means[at])("monotone", monotone)(
        "worst_rise", worst_rise);
    std::ostringstream curve;
    for (std::size_t d = 0; d < deltas_pm.size(); ++d) curve << (d ? "," : "") << deltas_pm[d] << ':' << means[d];
    l("curve", curve.str());
    o.details.push_back(l.str());
  }
  o.pass = all_ok;
  return o;
}

Outcome thermal_robustness() {
  Outcome o;
  std::vector<double> sweep;
  for (int i = -10; i <= 10; ++i) sweep.push_back(0.5 * i);
  const auto code = bch::BchCode::create(9, tol::c8_t);
  const auto noise = sim::NoiseParams::defaults();

  std::vector<double> off_at;
  double on_min = 1.0;
  std::size_t accepted = 0;
  std::size_t attempts = 0;
  std::size_t max_errors = 0;
  bool framed = true;
  std::map<double, std::vector<double>> off_curve;
  for (std::uint64_t ti = 0; ti < 5; ++ti) {
    const auto tok = sim::TokenModel::create(derive_seed({0xC8, ti}), sim::TokenKind::diffuser);
    const auto chal = sim::random_pattern(tok.grid(), derive_seed({0xC8, ti, 1}));
    const auto ref = sim::respond(tok, chal, noise.with_seed(derive_seed({0xC8, ti, 2})));
    hashing::HashConfig cfg;
    cfg.output_bits = static_cast<std::size_t>(code.length());
    cfg.seed = derive_seed({0xC8, ti, 3});
    const auto e = protocol::enroll(ref, cfg, code, derive_seed({0xC8, ti, 4}));
    for (std::size_t k = 0; k < sweep.size(); ++k) {
      auto off = noise.with_seed(derive_seed({0xC8, ti, 5, k}));
      off.delta_t = sweep[k];
      const double cc_off = eval::cross_correlation(ref, sim::respond(tok, chal, off));
      off_curve[std::abs(sweep[k])].push_back(cc_off);
      if (std::abs(std::abs(sweep[k]) - tol::c8_off_at) < 1e-9) off_at.push_back(cc_off);

      const auto on_image = sim::respond(tok, chal, noise.with_seed(derive_seed({0xC8, ti, 6, k})));
      on_min = std::min(on_min, eval::cross_correlation(ref, on_image));
      const auto hashed = hashing::hash_with(on_image, e.record.helper);
      max_errors = std::max(max_errors, hamming_distance(hashed, e.key));
      const auto a = protocol::authenticate(on_image, e.record);
      ++attempts;
      if (a && a->key == e.key) {
        ++accepted;
        framed = framed && frame_key(a->key, tol::c8_frame) == frame_key(e.key, tol::c8_frame) &&
                 frame_key(a->key, tol::c8_frame).size() == tol::c8_frame;
      }
    }
  }
  const double off_mean = eval::mean(off_at);
  std::ostringstream curve;
  for (const auto& [dt, v] : off_curve) curve << (dt == 0.0 ? "" : ",") << dt << ':' << eval::mean(v);
  o.details.push_back(Line()("off_cc_at_3C", off_mean)("limit", tol::c8_off_max)("off_curve", curve.str()).str());
  o.details.push_back(Line()("on_cc_min", on_min)("limit", tol::c8_on_min).str());
  o.details.push_back(Line()("code", "BCH(511," + std::to_string(code.message_length()) + ")")("t", tol::c8_t)(
                          "accepted", accepted)("attempts", attempts)("max_residual_errors", max_errors)(
                          "frame_bits", tol::c8_frame)
                          .str());
  o.pass = off_mean < tol::c8_off_max && on_min > tol::c8_on_min && accepted == attempts && framed;
  return o;
}

Outcome randomness_suite() {
  Outcome o;
  const auto tok = sim::TokenModel::create(0xC9, sim::TokenKind::diffuser, {16, 16}, {256, 256});
  const auto noise = sim::NoiseParams::defaults();
  std::vector<sim::SpeckleImage> images;
  for (std::size_t i = 0; i < tol::c9_streams; ++i)
    images.push_back(sim::respond(tok, sim::random_pattern(tok.grid(), derive_seed({0xC9, i})),
                                  noise.with_seed(derive_seed({0xC9, i, 1}))));
  const auto bits = randomness::extract_bits(images, {tol::c9_bits, 0xC9});
  std::vector<randomness::BitStream> streams;
  for (std::size_t i = 0; i < tol::c9_streams; ++i)
    streams.emplace_back(bits.begin() + static_cast<std::ptrdiff_t>(i * tol::c9_bits),
                         bits.begin() + static_cast<std::ptrdiff_t>((i + 1) * tol::c9_bits));
  const auto tests = randomness::all_tests();
  const auto rows = randomness::suite_report(streams, tests);
  bool ok = tests.size() == 8;
  for (const auto& r : rows) {
    ok = ok && r.proportion_ok && r.uniformity_ok;
    o.details.push_back(Line()("test", r.name)("passed", std::to_string(r.passed) + "/" + std::to_string(r.total))(
                            "band", std::to_string(r.band_low) + ".." + std::to_string(r.band_high))(
                            "uniformity_p", r.uniformity_p)("ok", r.proportion_ok && r.uniformity_ok)
                            .str());
  }
  o.details.insert(o.details.begin(), Line()("streams", streams.size())("bits", tol::c9_bits)(
                                          "helpers_per_image", 1 + (tol::c9_bits - 1) / randomness::bits_per_helper(tok.out()))(
                                          "rows", rows.size())
                                          .str());
  o.pass = ok;
  return o;
}

Outcome service_round_trip() {
  using namespace std::chrono_literals;
  Outcome o;
  const auto dir = std::filesystem::temp_directory_path() / ("photopuf_acceptance_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  service::Device device(service::DeviceConfig{}, std::make_shared<service::RecordStore>(dir));
  const auto tok = sim::TokenModel::create(0xCA, sim::TokenKind::diffuser);
  device.add_token(tok);
  service::Server server(device, {"127.0.0.1", 0}, 100ms);
  const auto port = server.start();

  std::map<std::string, std::vector<double>> ms;
  bool replies_ok = true;
  auto timed = [&](const std::string& name, service::Client& c, const service::Message& m) {
    const auto start = Clock::now();
    auto reply = c.request(m);
    ms[name].push_back(1000.0 * seconds_since(start));
    return reply;
  };
  {
    service::Client client("127.0.0.1", port);
    for (std::uint64_t i = 0; i < 20; ++i) {
      const auto e = timed("enroll", client, service::EnrollRequest{tok.id(), sim::random_pattern(tok.grid(), i)});
      const auto* er = std::get_if<service::EnrollResult>(&e);
      if (!er) {
        replies_ok = false;
        continue;
      }
      const auto a = timed("auth", client, service::AuthRequest{er->record_id});
      const auto* ar = std::get_if<service::AuthResult>(&a);
      replies_ok = replies_ok && ar && ar->accepted;
      const auto r = timed("random", client, service::RandomRequest{1024});
      const auto* rr = std::get_if<service::RandomResult>(&r);
      replies_ok = replies_ok && rr && rr->bits.size() == 1024;
    }
  }
  double worst = 0.0;
  for (const auto& [name, v] : ms) {
    auto sorted = v;
    std::sort(sorted.begin(), sorted.end());
    worst = std::max(worst, sorted.back());
    o.details.push_back(Line()("op", name)("n", v.size())("median_ms", sorted[sorted.size() / 2])("max_ms",
                                                                                                   sorted.back())
                            .str());
  }

  // Fault injection: malformed frames on fresh and reused connections.
  Rng rng(0xCA);
  std::size_t injected = 0;
  std::size_t error_replies = 0;
  std::size_t other_replies = 0;
  std::size_t no_reply = 0;
  const auto valid = service::encode_payload(service::EnrollRequest{tok.id(), sim::random_pattern(tok.grid(), 1)});
  for (int i = 0; i < 300; ++i) {
    service::Client c("127.0.0.1", port);
    Bytes payload;
    switch (i % 6) {
      case 0:  // random payload
        payload.resize(rng.below(48));
        for (auto& b : payload) b = static_cast<std::uint8_t>(rng.below(256));
        break;
      case 1:  // known opcode, random body
        payload.resize(1 + rng.below(40));
        for (auto& b : payload) b = static_cast<std::uint8_t>(rng.below(256));
        payload[0] = static_cast<std::uint8_t>(std::array{1, 2, 5}[rng.below(3)]);
        break;
      case 2:  // bit flips in a valid request
        payload = valid;
        for (int f = 0; f < 3; ++f) payload[rng.below(payload.size())] ^= static_cast<std::uint8_t>(1U << rng.below(8));
        break;
      case 3:  // truncated valid request
        payload.assign(valid.begin(), valid.begin() + static_cast<std::ptrdiff_t>(rng.below(valid.size())));
        break;
      case 4:  // reply opcodes sent as requests
        payload = service::encode_payload(service::AuthResult{true, 3});
        break;
      default:
        break;
    }
    ++injected;
    if (i % 6 == 5) {
      // Length prefix promising more than is sent, or above the limit.
      if (rng.bit()) c.send_raw(Bytes{0x7F, 0xFF, 0xFF, 0xFF});
      else c.send_raw(Bytes{0, 0, 1, 0, 1, 2, 3});
    } else {
      c.send_raw(service::frame(payload));
    }
    try {
      const auto reply = c.receive(2000ms);
      if (std::holds_alternative<service::ErrorReply>(reply)) ++error_replies;
      else ++other_replies;
    } catch (const std::exception&) {
      ++no_reply;
    }
  }
  service::Client probe("127.0.0.1", port);
  const auto alive = probe.request(service::RandomRequest{64});
  const bool survived = std::holds_alternative<service::RandomResult>(alive);
  server.stop();
  std::filesystem::remove_all(dir);

  o.details.push_back(Line()("fault_frames", injected)("error_replies", error_replies)("other_replies",
                                                                                        other_replies)(
                          "no_reply", no_reply)("alive_after", survived)
                          .str());
  o.pass = replies_ok && worst < tol::c10_ms && survived && error_replies + other_replies + no_reply == injected;
  o.details.insert(o.details.begin(), Line()("worst_ms", worst)("limit_ms", tol::c10_ms)("replies_ok", replies_ok).str());
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"C1", bch_exhaustive},          {"C2", fuzzy_radius},          {"C3", threshold_reproduction},
      {"C4", collision_floor},         {"C5", rbm_statistics},        {"C6", histogram_separation},
      {"C7", wavelength_decorrelation}, {"C8", thermal_robustness},   {"C9", randomness_suite},
      {"C10", service_round_trip},
  };
  std::set<std::string> wanted(argv + 1, argv + argc);
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    if (!wanted.empty() && !wanted.count(name)) continue;
    const auto start = Clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.details.push_back(std::string("exception: ") + e.what());
    }
    std::cout << name << ' ' << (o.pass ? "PASS" : "FAIL") << " (" << seconds_since(start) << " s)\n";
    for (const auto& d : o.details) std::cout << "    " << d << '\n';
    std::cout.flush();
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
