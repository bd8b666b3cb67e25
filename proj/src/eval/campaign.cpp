#include "photopuf/eval/campaign.hpp"

#include <algorithm>
#include <thread>
#include <unordered_set>

#include "photopuf/common/errors.hpp"
#include "photopuf/common/random.hpp"

namespace photopuf::eval {

namespace {

template <typename F>
void parallel_for(std::size_t n, F&& f) {
  const std::size_t workers =
      std::min<std::size_t>(n, std::max(1U, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < n; i += workers) f(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

sim::TokenModel make_token(const Campaign& c, std::uint64_t seed) {
  if (c.decorrelation_pm) return sim::TokenModel::create(seed, c.token_kind, c.grid, c.out, *c.decorrelation_pm);
  return sim::TokenModel::create(seed, c.token_kind, c.grid, c.out);
}

}  // namespace

const char* to_string(CampaignKind kind) {
  switch (kind) {
    case CampaignKind::robustness: return "robustness";
    case CampaignKind::unpredictability: return "unpredictability";
    case CampaignKind::unclonability: return "unclonability";
  }
  return "?";
}

CampaignKind parse_campaign_kind(const std::string& text) {
  if (text == "robustness") return CampaignKind::robustness;
  if (text == "unpredictability") return CampaignKind::unpredictability;
  if (text == "unclonability") return CampaignKind::unclonability;
  throw InvalidArgument("unknown campaign kind '" + text + "'");
}

void Campaign::validate() const {
  noise.validate();
  if (token_seeds.empty()) throw InvalidArgument("campaign: no token seeds");
  if (challenges.empty()) throw InvalidArgument("campaign: no challenges");
  switch (kind) {
    case CampaignKind::robustness:
      if (repeats < 2) throw InvalidArgument("campaign: robustness needs at least 2 repeats");
      break;
    case CampaignKind::unpredictability:
      if (challenges.size() < 2)
        throw InvalidArgument("campaign: unpredictability needs at least 2 challenges");
      break;
    case CampaignKind::unclonability:
      if (token_seeds.size() < 2)
        throw InvalidArgument("campaign: unclonability needs at least 2 tokens");
      break;
  }
  if (max_pairs == 0) throw InvalidArgument("campaign: max_pairs must be positive");
}

std::vector<sim::SpeckleImage> capture_campaign(const Campaign& c) {
  c.validate();
  std::size_t n = 0;
  switch (c.kind) {
    case CampaignKind::robustness: n = c.repeats; break;
    case CampaignKind::unpredictability: n = c.challenges.size(); break;
    case CampaignKind::unclonability: n = c.token_seeds.size(); break;
  }
  std::vector<sim::SpeckleImage> images(n);
  if (c.kind == CampaignKind::unclonability) {
    parallel_for(n, [&](std::size_t i) {
      const auto token = make_token(c, c.token_seeds[i]);
      images[i] = sim::respond(token, c.challenges[0],
                               c.noise.with_seed(derive_seed({c.noise.noise_seed, i})), c.camera);
    });
    return images;
  }
  const auto token = make_token(c, c.token_seeds[0]);
  const bool all_wavelengths = std::all_of(c.challenges.begin(), c.challenges.end(), [](const auto& ch) {
    return std::holds_alternative<sim::Wavelength>(ch);
  });
  if (c.kind == CampaignKind::unpredictability && all_wavelengths) {
    std::vector<double> lambdas;
    for (const auto& ch : c.challenges) lambdas.push_back(std::get<sim::Wavelength>(ch).nm);
    return sim::wavelength_sweep(token, lambdas, c.noise, c.camera);
  }
  parallel_for(n, [&](std::size_t i) {
    const auto& ch = c.kind == CampaignKind::robustness ? c.challenges[0] : c.challenges[i];
    images[i] = sim::respond(token, ch, c.noise.with_seed(derive_seed({c.noise.noise_seed, i})),
                             c.camera);
  });
  return images;
}

std::vector<std::pair<std::size_t, std::size_t>> campaign_pairs(const Campaign& c, std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  if (c.kind != CampaignKind::robustness) {
    for (std::size_t j = 1; j < n; ++j) pairs.emplace_back(0, j);
  } else {
    const std::size_t all = n * (n - 1) / 2;
    if (all <= c.max_pairs) {
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
    } else {
      Rng rng(derive_seed({c.sample_seed, 0x9A125}));
      std::unordered_set<std::uint64_t> seen;
      while (pairs.size() < c.max_pairs) {
        auto i = rng.below(n);
        auto j = rng.below(n);
        if (i == j) continue;
        if (i > j) std::swap(i, j);
        if (seen.insert(i * n + j).second) pairs.emplace_back(i, j);
      }
      std::sort(pairs.begin(), pairs.end());
    }
  }
  if (pairs.size() > c.max_pairs) {
    Rng rng(derive_seed({c.sample_seed, 0x9A126}));
    const auto keep = sample_without_replacement(rng, static_cast<std::uint32_t>(pairs.size()),
                                                 static_cast<std::uint32_t>(c.max_pairs));
    std::vector<std::pair<std::size_t, std::size_t>> sub;
    for (auto k : keep) sub.push_back(pairs[k]);
    std::sort(sub.begin(), sub.end());
    pairs = std::move(sub);
  }
  return pairs;
}

CampaignResult run_campaign(const Campaign& c, const std::optional<hashing::HashHelper>& helper) {
  const auto images = capture_campaign(c);
  const auto pairs = campaign_pairs(c, images.size());

  std::vector<BitKey> keys;
  if (helper) {
    keys.resize(images.size());
    parallel_for(images.size(), [&](std::size_t i) { keys[i] = hashing::hash_with(images[i], *helper); });
  }

  std::vector<double> ed(pairs.size()), cc(pairs.size()), hd;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto [i, j] = pairs[k];
    ed[k] = euclidean(images[i], images[j]);
    cc[k] = cross_correlation(images[i], images[j]);
  }
  CampaignResult res{make_report("ed", std::move(ed)), make_report("cc", std::move(cc)), {}};
  if (helper) {
    hd.resize(pairs.size());
    for (std::size_t k = 0; k < pairs.size(); ++k)
      hd[k] = fractional_hamming(keys[pairs[k].first], keys[pairs[k].second]);
    res.hd = make_report("hd", std::move(hd));
  }
  return res;
}

}  // namespace photopuf::eval
