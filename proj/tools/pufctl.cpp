// pufctl: command line front end for the simulated optical PUF.
//
// Results go to stdout as key=value lines. Exit codes: 0 success, 1 negative
// verdict (rejected authentication, failed randomness suite), 2 usage error,
// 3 runtime error.

#include <pthread.h>
#include <signal.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>

#include "CLI11.hpp"
#include "photopuf/common/errors.hpp"
#include "photopuf/eval/campaign.hpp"
#include "photopuf/protocol/fuzzy.hpp"
#include "photopuf/randomness/randomness.hpp"
#include "photopuf/service/server.hpp"
#include "photopuf/sim/pgm.hpp"
#include "photopuf/sim/token.hpp"

using namespace photopuf;
namespace fs = std::filesystem;

namespace {

enum ExitCode { kOk = 0, kReject = 1, kUsage = 2, kFailure = 3 };

template <typename T>
void kv(const std::string& key, const T& value) {
  std::cout << key << '=' << value << '\n';
}

void kv(const std::string& key, double value) {
  std::ostringstream os;
  os << std::setprecision(6) << value;
  std::cout << key << '=' << os.str() << '\n';
}

sim::TokenModel load_token(const std::string& path) {
  return sim::TokenModel::from_descriptor(read_file(path));
}

sim::Challenge load_challenge(const std::string& path) {
  return sim::read_challenge_file(read_file(path));
}

/// Token lookup by id: <dir>/<hex id>.puft.
sim::TokenModel find_token(const sim::TokenId& id, const std::string& dir) {
  const auto path = fs::path(dir) / (to_hex(id) + ".puft");
  if (!fs::exists(path)) throw InvalidArgument("token " + to_hex(id) + " not found in " + dir);
  return load_token(path.string());
}

struct NoiseOptions {
  sim::NoiseParams p = sim::NoiseParams::defaults();

  void add(CLI::App* app, std::uint64_t default_seed) {
    p.noise_seed = default_seed;
    app->add_option("--noise", p.intensity_sigma, "additive intensity noise, fraction of full scale")
        ->capture_default_str();
    app->add_option("--phase-drift", p.phase_drift_sigma, "phase jitter per path, radians")
        ->capture_default_str();
    app->add_option("--vibration", p.vibration_sigma, "vibration phase jitter scale, radians")
        ->capture_default_str();
    app->add_option("--delta-t", p.delta_t, "temperature offset, degrees C")->capture_default_str();
    app->add_option("--drift-coeff", p.drift_coeff, "thermal phase drift, radians per degree")
        ->capture_default_str();
    app->add_option("--noise-seed", p.noise_seed)->capture_default_str();
  }
};

struct HashOptions {
  std::string algo = "rbm";
  std::uint64_t seed = 0;
  hashing::SvdShape shape;

  void add(CLI::App* app) {
    app->add_option("--hash", algo, "rbm or svd")
        ->check(CLI::IsMember({"rbm", "svd"}))
        ->capture_default_str();
    app->add_option("--hash-seed", seed)->capture_default_str();
    app->add_option("--k1", shape.k1)->capture_default_str();
    app->add_option("--k2", shape.k2)->capture_default_str();
    app->add_option("--p", shape.p)->capture_default_str();
    app->add_option("--r", shape.r)->capture_default_str();
  }

  hashing::HashConfig config(std::size_t bits) const {
    hashing::HashConfig c;
    c.algorithm = algo == "svd" ? hashing::HashConfig::Algorithm::svd : hashing::HashConfig::Algorithm::rbm;
    c.output_bits = bits;
    c.svd = shape;
    c.seed = seed;
    return c;
  }

  hashing::HashHelper helper(sim::Dims dims, std::size_t bits) const {
    if (algo == "svd") return hashing::make_svd_helper(dims, bits, shape, seed);
    return hashing::make_rbm_helper(dims, bits, seed);
  }
};

void print_report(const std::string& prefix, const eval::DistanceReport& r) {
  kv(prefix + "_mean", r.mean);
  kv(prefix + "_std", r.stddev);
}

void write_reports(const std::string& path, const eval::CampaignResult& res) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << "metric\tlower\tupper\tcount\tmass\n";
  auto dump = [&](const eval::DistanceReport& r) {
    std::ostringstream tmp;
    eval::write_histogram_tsv(tmp, r);
    std::istringstream lines(tmp.str());
    std::string line;
    std::getline(lines, line);  // header
    while (std::getline(lines, line)) os << r.metric << '\t' << line << '\n';
  };
  dump(res.ed);
  dump(res.cc);
  if (res.hd) dump(*res.hd);
}

std::vector<double> parse_wavelengths(const std::string& text) {
  // start:step:count
  const auto a = text.find(':'), b = text.rfind(':');
  if (a == std::string::npos || a == b) throw InvalidArgument("wavelengths must be start:step:count");
  const double start = std::stod(text.substr(0, a));
  const double step = std::stod(text.substr(a + 1, b - a - 1));
  const auto count = std::stoul(text.substr(b + 1));
  std::vector<double> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(start + step * static_cast<double>(i));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulated optical PUF toolkit"};
  app.require_subcommand(1);
  int exit_code = kOk;

  // token ---------------------------------------------------------------
  auto* token = app.add_subcommand("token", "create or inspect simulated tokens");
  token->require_subcommand(1);
  struct {
    std::uint64_t seed = 0;
    std::string kind = "diffuser", grid = "16x16", out = "128x128", path;
    std::optional<double> decorrelation;
  } tnew;
  auto* token_new = token->add_subcommand("new", "create a token file");
  token_new->add_option("--seed", tnew.seed)->required();
  token_new->add_option("--kind", tnew.kind)->check(CLI::IsMember({"diffuser", "pof"}))->capture_default_str();
  token_new->add_option("--grid", tnew.grid, "challenge grid RxC")->capture_default_str();
  token_new->add_option("--out", tnew.out, "camera RxC")->capture_default_str();
  token_new->add_option("--decorrelation-pm", tnew.decorrelation, "wavelength decorrelation length");
  token_new->add_option("-o,--output", tnew.path, "token file (default <id>.puft)");
  token_new->callback([&] {
    const auto kind = sim::parse_token_kind(tnew.kind);
    const auto grid = sim::parse_dims(tnew.grid), out = sim::parse_dims(tnew.out);
    const auto t = tnew.decorrelation ? sim::TokenModel::create(tnew.seed, kind, grid, out, *tnew.decorrelation)
                                      : sim::TokenModel::create(tnew.seed, kind, grid, out);
    const auto path = tnew.path.empty() ? to_hex(t.id()) + ".puft" : tnew.path;
    write_file(path, t.descriptor());
    kv("token_id", to_hex(t.id()));
    kv("path", path);
  });

  std::string tshow_path;
  auto* token_show = token->add_subcommand("show", "print token parameters");
  token_show->add_option("token", tshow_path)->required()->check(CLI::ExistingFile);
  token_show->callback([&] {
    const auto t = load_token(tshow_path);
    kv("token_id", to_hex(t.id()));
    kv("kind", sim::to_string(t.kind()));
    kv("seed", t.seed());
    kv("grid", sim::to_string(t.grid()));
    kv("out", sim::to_string(t.out()));
    kv("decorrelation_pm", t.wl_decorrelation_pm());
  });

  // challenge -------------------------------------------------------------
  auto* challenge = app.add_subcommand("challenge", "challenge files");
  challenge->require_subcommand(1);
  struct {
    std::string grid = "16x16", path;
    std::uint64_t seed = 0;
    double density = 0.5;
    std::optional<double> wavelength;
  } cgen;
  auto* challenge_gen = challenge->add_subcommand("gen", "generate a random pattern or wavelength challenge");
  challenge_gen->add_option("--grid", cgen.grid)->capture_default_str();
  challenge_gen->add_option("--seed", cgen.seed)->capture_default_str();
  challenge_gen->add_option("--density", cgen.density)->check(CLI::Range(0.0, 1.0))->capture_default_str();
  challenge_gen->add_option("--wavelength", cgen.wavelength, "laser wavelength in nm instead of a pattern");
  challenge_gen->add_option("-o,--output", cgen.path)->required();
  challenge_gen->callback([&] {
    sim::Challenge c;
    if (cgen.wavelength) {
      if (*cgen.wavelength < sim::kTuningMinNm || *cgen.wavelength > sim::kTuningMaxNm)
        throw InvalidArgument("wavelength outside the tuning range");
      c = sim::Wavelength{*cgen.wavelength};
      kv("type", "wavelength");
      kv("nm", *cgen.wavelength);
    } else {
      const auto p = sim::random_pattern(sim::parse_dims(cgen.grid), cgen.seed, cgen.density);
      kv("type", "pattern");
      kv("grid", sim::to_string(p.dims()));
      kv("pixels_on", p.count_on());
      c = p;
    }
    write_file(cgen.path, sim::challenge_file(c));
    kv("path", cgen.path);
  });

  // capture ---------------------------------------------------------------
  struct {
    std::string token, challenge, path;
    NoiseOptions noise;
  } cap;
  auto* capture = app.add_subcommand("capture", "simulate one camera frame and save it as PGM");
  capture->add_option("--token", cap.token)->required()->check(CLI::ExistingFile);
  capture->add_option("--challenge", cap.challenge)->required()->check(CLI::ExistingFile);
  capture->add_option("-o,--output", cap.path)->required();
  cap.noise.add(capture, 0);
  capture->callback([&] {
    const auto img = sim::respond(load_token(cap.token), load_challenge(cap.challenge), cap.noise.p);
    sim::save_pgm(img, cap.path);
    std::vector<double> px(img.pixels().begin(), img.pixels().end());
    kv("dims", sim::to_string(img.dims()));
    kv("mean", eval::mean(px));
    kv("path", cap.path);
  });

  // enroll ----------------------------------------------------------------
  struct {
    std::string token, challenge, image, record;
    int m = 8, t = 31;
    std::uint64_t seed = 0;
    HashOptions hash;
    NoiseOptions noise;
  } en;
  auto* enroll = app.add_subcommand("enroll", "enroll a token response");
  enroll->add_option("--token", en.token)->required()->check(CLI::ExistingFile);
  enroll->add_option("--challenge", en.challenge)->required()->check(CLI::ExistingFile);
  enroll->add_option("--image", en.image, "enroll this PGM instead of a fresh capture")->check(CLI::ExistingFile);
  enroll->add_option("--record", en.record, "record file (default <record id>.pufr)");
  enroll->add_option("--bch-m", en.m)->capture_default_str();
  enroll->add_option("--bch-t", en.t)->capture_default_str();
  enroll->add_option("--seed", en.seed, "secret seed")->capture_default_str();
  en.hash.add(enroll);
  en.noise.add(enroll, 0);
  enroll->callback([&] {
    const auto tok = load_token(en.token);
    const auto ch = load_challenge(en.challenge);
    const auto img = en.image.empty() ? sim::respond(tok, ch, en.noise.p) : sim::load_pgm(en.image);
    const auto code = bch::BchCode::create(en.m, en.t);
    const auto e = protocol::enroll(img, en.hash.config(static_cast<std::size_t>(code.length())), code,
                                    en.seed, {tok.id(), ch});
    const auto path = en.record.empty() ? protocol::to_hex(e.record.record_id) + ".pufr" : en.record;
    protocol::save_record(path, e.record);
    kv("record_id", protocol::to_hex(e.record.record_id));
    kv("key_digest", to_hex(e.record.key_digest));
    kv("n", code.length());
    kv("k", code.message_length());
    kv("t", code.t());
    kv("path", path);
  });

  // auth ------------------------------------------------------------------
  struct {
    std::string record, token, token_dir = ".", image;
    NoiseOptions noise;
  } au;
  auto* auth = app.add_subcommand("auth", "authenticate a fresh response against a record");
  auth->add_option("--record", au.record)->required()->check(CLI::ExistingFile);
  auth->add_option("--token", au.token, "token file (default: look up by id)")->check(CLI::ExistingFile);
  auth->add_option("--token-dir", au.token_dir)->capture_default_str();
  auth->add_option("--image", au.image, "authenticate this PGM instead of a fresh capture")
      ->check(CLI::ExistingFile);
  au.noise.add(auth, 1);
  auth->callback([&] {
    const auto rec = protocol::load_record(au.record);
    sim::SpeckleImage img;
    if (!au.image.empty()) {
      img = sim::load_pgm(au.image);
    } else {
      const auto tok = au.token.empty() ? find_token(rec.token_id, au.token_dir) : load_token(au.token);
      if (tok.id() != rec.token_id) throw InvalidArgument("token does not match the record");
      img = sim::respond(tok, rec.challenge, au.noise.p);
    }
    const auto a = protocol::authenticate(img, rec);
    const bool accepted = a && protocol::verify(a->key, rec);
    kv("record_id", protocol::to_hex(rec.record_id));
    kv("decoded", a ? "yes" : "no");
    if (a) kv("corrected", a->corrected);
    kv("verdict", accepted ? "accept" : "reject");
    if (!accepted) exit_code = kReject;
  });

  // eval ------------------------------------------------------------------
  auto* ev = app.add_subcommand("eval", "evaluation campaigns");
  ev->require_subcommand(1);
  struct {
    std::string token, challenge, report, kind = "diffuser", grid = "16x16", out = "128x128", wavelengths;
    std::size_t repeats = 60, challenges = 60, tokens = 100, bits = 255, t_max = 63;
    std::uint64_t token_seed = 0, challenge_seed = 1;
    bool no_hash = false, decoded = false;
    int m = 8;
    HashOptions hash;
    NoiseOptions noise;
  } eo;

  auto campaign_base = [&](eval::CampaignKind kind) {
    eval::Campaign c;
    c.kind = kind;
    c.noise = eo.noise.p;
    if (!eo.token.empty()) {
      const auto t = load_token(eo.token);
      c.token_kind = t.kind();
      c.grid = t.grid();
      c.out = t.out();
      c.decorrelation_pm = t.wl_decorrelation_pm();
      c.token_seeds = {t.seed()};
    }
    if (!eo.challenge.empty()) c.challenges = {load_challenge(eo.challenge)};
    return c;
  };
  auto finish_campaign = [&](const eval::Campaign& c) {
    std::optional<hashing::HashHelper> helper;
    if (!eo.no_hash) helper = eo.hash.helper(c.out, eo.bits);
    const auto res = eval::run_campaign(c, helper);
    kv("campaign", eval::to_string(c.kind));
    kv("pairs", res.ed.values.size());
    print_report("ed", res.ed);
    print_report("cc", res.cc);
    if (res.hd) print_report("hd", *res.hd);
    const auto path = eo.report.empty() ? std::string(eval::to_string(c.kind)) + "_report.tsv" : eo.report;
    write_reports(path, res);
    kv("report", path);
  };
  auto add_common = [&](CLI::App* s) {
    s->add_option("--report", eo.report, "histogram TSV (default <kind>_report.tsv)");
    s->add_option("--bits", eo.bits, "hash length")->capture_default_str();
    s->add_flag("--no-hash", eo.no_hash, "skip Hamming distances");
    eo.hash.add(s);
    eo.noise.add(s, 0);
  };

  auto* rob = ev->add_subcommand("robustness", "repeated noisy captures of one token and challenge");
  rob->add_option("--token", eo.token)->required()->check(CLI::ExistingFile);
  rob->add_option("--challenge", eo.challenge)->required()->check(CLI::ExistingFile);
  rob->add_option("--repeats", eo.repeats)->capture_default_str();
  add_common(rob);
  rob->callback([&] {
    auto c = campaign_base(eval::CampaignKind::robustness);
    c.repeats = eo.repeats;
    finish_campaign(c);
  });

  auto* unp = ev->add_subcommand("unpredictability", "one token, many challenges");
  unp->add_option("--token", eo.token)->required()->check(CLI::ExistingFile);
  unp->add_option("--challenges", eo.challenges, "number of random patterns")->capture_default_str();
  unp->add_option("--challenge-seed", eo.challenge_seed)->capture_default_str();
  unp->add_option("--wavelengths", eo.wavelengths, "start:step:count in nm instead of patterns");
  add_common(unp);
  unp->callback([&] {
    auto c = campaign_base(eval::CampaignKind::unpredictability);
    if (!eo.wavelengths.empty()) {
      for (double nm : parse_wavelengths(eo.wavelengths)) c.challenges.push_back(sim::Wavelength{nm});
    } else {
      for (std::size_t i = 0; i < eo.challenges; ++i)
        c.challenges.push_back(sim::random_pattern(c.grid, eo.challenge_seed + i));
    }
    finish_campaign(c);
  });

  auto* unc = ev->add_subcommand("unclonability", "one challenge, many tokens");
  unc->add_option("--challenge", eo.challenge)->required()->check(CLI::ExistingFile);
  unc->add_option("--tokens", eo.tokens)->capture_default_str();
  unc->add_option("--token-seed", eo.token_seed, "seed of the first token")->capture_default_str();
  unc->add_option("--kind", eo.kind)->check(CLI::IsMember({"diffuser", "pof"}))->capture_default_str();
  unc->add_option("--out", eo.out)->capture_default_str();
  add_common(unc);
  unc->callback([&] {
    auto c = campaign_base(eval::CampaignKind::unclonability);
    c.token_kind = sim::parse_token_kind(eo.kind);
    c.out = sim::parse_dims(eo.out);
    if (const auto* p = std::get_if<sim::PixelPattern>(&c.challenges.front())) c.grid = p->dims();
    for (std::size_t i = 0; i < eo.tokens; ++i) c.token_seeds.push_back(eo.token_seed + i);
    finish_campaign(c);
  });

  auto* sc = ev->add_subcommand("success-curve", "Pr[K_A = K_E] against the correction capability t");
  sc->add_option("--token", eo.token)->required()->check(CLI::ExistingFile);
  sc->add_option("--challenge", eo.challenge)->required()->check(CLI::ExistingFile);
  sc->add_option("--repeats", eo.repeats, "noisy authentications")->capture_default_str();
  sc->add_option("--bch-m", eo.m)->capture_default_str();
  sc->add_option("--t-max", eo.t_max)->capture_default_str();
  sc->add_flag("--decoded", eo.decoded, "run the BCH commitment for every t instead of counting distances");
  sc->add_option("--report", eo.report, "curve TSV (default success_curve.tsv)");
  eo.hash.add(sc);
  eo.noise.add(sc, 0);
  sc->callback([&] {
    auto c = campaign_base(eval::CampaignKind::robustness);
    c.repeats = eo.repeats + 1;
    const auto images = eval::capture_campaign(c);
    const std::size_t n = (std::size_t{1} << eo.m) - 1;
    const auto helper = eo.hash.helper(c.out, n);
    const auto enrolled = hashing::hash_with(images[0], helper);
    std::vector<BitKey> e, a;
    for (std::size_t i = 1; i < images.size(); ++i) {
      e.push_back(enrolled);
      a.push_back(hashing::hash_with(images[i], helper));
    }
    eval::SuccessCurve curve;
    if (eo.decoded) {
      std::vector<std::size_t> ts;
      for (std::size_t t = 1; t <= eo.t_max; ++t) {
        try {
          (void)bch::BchCode::create(eo.m, static_cast<int>(t));
          ts.push_back(t);
        } catch (const InvalidArgument&) {
          break;
        }
      }
      curve = eval::decoded_success_curve(e, a, eo.m, ts, eo.hash.seed);
    } else {
      curve = eval::success_curve(e, a, eo.t_max);
    }
    kv("pairs", curve.pairs);
    const auto show = [](const std::optional<std::size_t>& t) { return t ? std::to_string(*t) : std::string("none"); };
    kv("t_at_0.999", show(curve.first_reaching(0.999)));
    kv("t_at_1", show(curve.first_reaching(1.0)));
    const auto path = eo.report.empty() ? std::string("success_curve.tsv") : eo.report;
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    eval::write_curve_tsv(os, curve);
    kv("report", path);
  });

  // rng -------------------------------------------------------------------
  auto* rng = app.add_subcommand("rng", "random bit extraction and statistical tests");
  rng->require_subcommand(1);
  struct {
    std::string token, path, stream, tests;
    std::size_t images = 1, bits = 20000, stream_bits = 20000;
    std::uint64_t seed = 0, challenge_seed = 0;
    NoiseOptions noise;
  } ro;
  auto* extract = rng->add_subcommand("extract", "capture random challenges and extract bits");
  extract->add_option("--token", ro.token)->required()->check(CLI::ExistingFile);
  extract->add_option("--images", ro.images)->capture_default_str();
  extract->add_option("--bits", ro.bits, "bits per image")->capture_default_str();
  extract->add_option("--seed", ro.seed, "helper seed")->capture_default_str();
  extract->add_option("--challenge-seed", ro.challenge_seed)->capture_default_str();
  extract->add_option("-o,--output", ro.path, "packed bit file, MSB first")->required();
  ro.noise.add(extract, 0);
  extract->callback([&] {
    const auto tok = load_token(ro.token);
    std::vector<sim::SpeckleImage> imgs;
    for (std::size_t i = 0; i < ro.images; ++i)
      imgs.push_back(sim::respond(tok, sim::random_pattern(tok.grid(), ro.challenge_seed + i),
                                  ro.noise.p.with_seed(derive_seed({ro.noise.p.noise_seed, i}))));
    const auto bits = randomness::extract_bits(imgs, {ro.bits, ro.seed});
    const BitKey key{std::vector<std::uint8_t>(bits)};
    write_file(ro.path, key.packed());
    kv("bits", bits.size());
    kv("ones_fraction", static_cast<double>(key.popcount()) / static_cast<double>(bits.size()));
    kv("path", ro.path);
  });

  auto* rtest = rng->add_subcommand("test", "run the statistical test suite on a packed bit file");
  rtest->add_option("--stream", ro.stream)->required()->check(CLI::ExistingFile);
  rtest->add_option("--stream-bits", ro.stream_bits, "bits per stream")->capture_default_str();
  rtest->add_option("--tests", ro.tests, "comma separated test names (default all)");
  rtest->callback([&] {
    const auto data = read_file(ro.stream);
    const auto all = BitKey::from_packed(data, data.size() * 8);
    if (ro.stream_bits == 0 || all.size() < ro.stream_bits) throw InvalidArgument("stream file shorter than one stream");
    std::vector<randomness::BitStream> streams;
    for (std::size_t off = 0; off + ro.stream_bits <= all.size(); off += ro.stream_bits)
      streams.emplace_back(all.bits().begin() + static_cast<std::ptrdiff_t>(off),
                           all.bits().begin() + static_cast<std::ptrdiff_t>(off + ro.stream_bits));
    std::vector<randomness::TestId> tests;
    if (ro.tests.empty()) {
      tests = randomness::all_tests();
    } else {
      std::stringstream ss(ro.tests);
      for (std::string name; std::getline(ss, name, ',');) tests.push_back(randomness::parse_test_id(name));
    }
    const auto rows = randomness::suite_report(streams, tests);
    kv("streams", streams.size());
    bool all_ok = true;
    for (const auto& r : rows) {
      std::cout << "test=" << r.name << " passed=" << r.passed << " total=" << r.total
                << " proportion=" << r.proportion << " band=" << r.band_low << ".." << r.band_high
                << " uniformity_p=" << r.uniformity_p
                << " ok=" << (r.proportion_ok && r.uniformity_ok ? "yes" : "no") << '\n';
      all_ok = all_ok && r.proportion_ok && (streams.size() < 10 || r.uniformity_ok);
    }
    kv("verdict", all_ok ? "pass" : "fail");
    if (!all_ok) exit_code = kReject;
  });

  // serve -----------------------------------------------------------------
  struct {
    std::string listen, records = "records";
    std::vector<std::string> tokens;
    int m = 8, t = 31;
    std::uint64_t seed = 1;
    HashOptions hash;
    NoiseOptions noise;
  } so;
  auto* serve = app.add_subcommand("serve", "run the framed TCP device service");
  serve->add_option("--listen", so.listen, "host:port")->envname("PUF_LISTEN")->required();
  serve->add_option("--records", so.records, "record directory")->capture_default_str();
  serve->add_option("--token", so.tokens, "token file (repeatable)")->required()->check(CLI::ExistingFile);
  serve->add_option("--bch-m", so.m)->capture_default_str();
  serve->add_option("--bch-t", so.t)->capture_default_str();
  serve->add_option("--seed", so.seed)->capture_default_str();
  so.hash.add(serve);
  so.noise.add(serve, 0);
  serve->callback([&] {
    service::DeviceConfig cfg;
    cfg.hash = so.hash.config((std::size_t{1} << so.m) - 1);
    cfg.bch_m = so.m;
    cfg.bch_t = so.t;
    cfg.noise = so.noise.p;
    cfg.seed = so.seed;
    service::Device device(cfg, std::make_shared<service::RecordStore>(so.records));
    for (const auto& p : so.tokens) device.add_token(load_token(p));
    // Worker threads inherit the mask, so only sigwait sees the signals.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);
    const auto address = service::parse_listen_address(so.listen);
    service::Server server(device, address);
    const auto port = server.start();
    kv("listening", address.host + ":" + std::to_string(port));
    std::cout.flush();
    int sig = 0;
    sigwait(&signals, &sig);
    server.stop();
    kv("stopped", sig);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return exit_code;
}
