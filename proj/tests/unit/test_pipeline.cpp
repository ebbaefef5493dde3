// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "test_util.hpp"
#include "vb/common/error.hpp"
#include "vb/common/log.hpp"
#include "vb/features/feature_store.hpp"
#include "vb/metrics/metrics.hpp"
#include "vb/pipeline/commands.hpp"
#include "vb/pipeline/config.hpp"
#include "vb/pipeline/level.hpp"
#include "vb/pipeline/manifest.hpp"
#include "vb/pipeline/toy_corpus.hpp"
#include "vb/signal/wav_io.hpp"
#include "vb/vocoder/griffin_lim.hpp"

using namespace vb;
using namespace vb::pipeline;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("vb_test_pipeline_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Toy settings cut down so a full train/synthesize cycle takes seconds.
ExperimentConfig fast_config(const fs::path& corpus, const fs::path& out) {
  auto c = toy_experiment_config();
  c.manifest = corpus / "manifest.json";
  c.output_dir = out;
  c.acoustic.net = {16, 1, 8, 8};
  c.acoustic.steps = 30;
  c.f0.steps = 20;
  c.gan.steps = 10;
  c.wavenet.blocks = 4;
  c.wavenet.residual = 8;
  c.wavenet.skip = 8;
  c.wavenet.post = 16;
  c.wavenet.f0_embedding = 8;
  c.wavenet_train.steps = 10;
  c.wavenet_train.segment = 800;
  return c;
}

struct Corpus {
  fs::path dir;
  DatasetManifest manifest;
};

const Corpus& toy_corpus() {
  static const Corpus c = [] {
    const auto dir = scratch("corpus");
    ToyCorpusConfig tc;
    tc.utterances = 5;
    tc.validation = 0;
    tc.test = 2;
    tc.min_seconds = 0.5;
    tc.max_seconds = 0.7;
    return Corpus{dir, write_toy_corpus(dir, tc, features::ExtractionConfig{})};
  }();
  return c;
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Quiet {
  Quiet() { log::set_level(log::Level::off); }
  ~Quiet() { log::set_level(log::Level::info); }
};

}  // namespace

TEST_CASE("method ids") {
  for (Method m : all_methods()) CHECK(parse_method(to_string(m)) == m);
  CHECK(all_methods().size() == 6);
  CHECK_THROWS_AS(parse_method("SAR-Pm"), ConfigError);
  CHECK_THROWS_AS(parse_method("sar-wo"), ConfigError);
  CHECK(wave_path(Method::sar_pr) == WavePath::phase_recovery);
  CHECK(wave_path(Method::sar_wa) == WavePath::wavenet);
  CHECK(uses_gan(Method::sga_wo));
  CHECK(acoustic_kind(Method::rga_wo) == acoustic::AcousticKind::rnn);
  CHECK(required_models(Method::sga_wo) == std::vector<std::string>{"sar", "f0", "gan-sar"});
  CHECK(required_models(Method::sar_wa) == std::vector<std::string>{"sar", "f0", "wavenet"});
}

TEST_CASE("config text format") {
  const auto j = parse_config_text(R"(
# comment
method = "SGA-Wo"   # trailing comment
a.b = 3
[x]
list = [1, 2.5, "s#t"]
flag = true
[x.y]
neg = -7
big = 18446744073709551615
)");
  CHECK(j.at("method") == "SGA-Wo");
  CHECK(j.at("a").at("b") == 3);
  CHECK(j.at("x").at("list") == nlohmann::json::array({1, 2.5, "s#t"}));
  CHECK(j.at("x").at("flag") == true);
  CHECK(j.at("x").at("y").at("neg") == -7);
  CHECK(j.at("x").at("y").at("big").get<std::uint64_t>() == 18446744073709551615ULL);
  CHECK(parse_config_text(format_config_text(j)) == j);

  CHECK_THROWS_AS(parse_config_text("a = 1\na = 2"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("a = nope"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[a\nb = 1"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("just words"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("a = 1\na.b = 2"), ConfigError);
}

TEST_CASE("config completeness and JSON equivalence") {
  const auto dir = scratch("config");
  const auto cfg = toy_experiment_config();
  save_config(dir / "exp.conf", cfg);
  const auto loaded = load_config(dir / "exp.conf");
  CHECK(loaded.audit.hidden.empty());
  CHECK(loaded.audit.unknown.empty());
  CHECK(loaded.config.to_json().at("acoustic") == cfg.to_json().at("acoustic"));
  CHECK(loaded.config.output_dir == dir / "out");

  {
    std::ofstream out(dir / "exp.json");
    out << cfg.to_json().dump(2);
  }
  CHECK(load_config(dir / "exp.json").config.to_json() == loaded.config.to_json());

  // A key left out of the file is reported as a hidden default.
  auto j = cfg.to_json();
  j["wavenet"].erase("blocks");
  j.erase("target_dbov");
  const auto audit = audit_config(j, ExperimentConfig::from_json(j).to_json());
  CHECK(audit.hidden == std::vector<std::string>{"target_dbov", "wavenet.blocks"});

  // Typos are rejected.
  {
    std::ofstream out(dir / "typo.conf");
    out << format_config_text(cfg.to_json()) << "\n[acoustic]\nsteps_ = 3\n";
  }
  CHECK_THROWS_AS(load_config(dir / "typo.conf"), ConfigError);
  {
    std::ofstream out(dir / "pm.conf");
    out << "method = \"SAR-Pm\"\n";
  }
  CHECK_THROWS_AS(load_config(dir / "pm.conf"), ConfigError);

  auto bad = cfg;
  bad.acoustic.mgc_dims = 40;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.method = Method::sar_wa;
  bad.wavenet.upsample = 40;
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  auto a = cfg, b = cfg;
  a.reseed(5);
  b.reseed(5);
  CHECK(a.to_json() == b.to_json());
  b.reseed(6);
  CHECK(a.acoustic.seed != b.acoustic.seed);
  CHECK(a.f0.seed != a.gan.seed);
}

TEST_CASE("level normalization") {
  const double target = std::pow(10.0, -26.0 / 20.0);
  SUBCASE("full-scale square wave") {
    signal::Waveform sq{std::vector<double>(1000), 16000};
    for (std::size_t i = 0; i < 1000; ++i) sq.samples[i] = (i / 20) % 2 ? 1.0 : -1.0;
    const auto r = normalize_level(sq);
    CHECK(r.input_dbov == doctest::Approx(0.0).epsilon(1e-12));
    for (std::size_t i = 0; i < 1000; ++i) CHECK(std::abs(r.wave.samples[i] - sq.samples[i] * target) < 1e-15);
  }
  SUBCASE("already normalized input keeps its level") {
    Rng rng(3);
    const auto first = normalize_level({vbtest::random_vector(rng, 5000), 16000});
    const auto again = normalize_level(first.wave);
    CHECK(std::abs(again.gain_db) < 0.01);
  }
  SUBCASE("sine at -6 dBov gets -20 dB") {
    // A sine of peak A has RMS A / sqrt(2).
    const double amp = std::sqrt(2.0) * std::pow(10.0, -6.0 / 20.0);
    const auto r = normalize_level({vbtest::sine(16000, 1000.0, 16000.0, amp), 16000});
    CHECK(r.gain_db == doctest::Approx(-20.0).epsilon(1e-9));
    double s = 0.0;
    for (double v : r.wave.samples) s += v * v;
    CHECK(std::abs(10.0 * std::log10(s / 16000.0) + 26.0) < 0.01);
  }
  SUBCASE("loud input is reported as clipped") {
    signal::Waveform w{std::vector<double>(100, 0.0), 16000};
    w.samples[0] = 1.0;  // RMS 0.1, scaled up by 10^(-26/20)/0.1 ~ 0.5: no clipping
    CHECK(normalize_level(w).clipped == 0);
    CHECK(normalize_level(w, 0.0).clipped == 1);
  }
  CHECK_THROWS_AS(normalize_level({std::vector<double>(100, 0.0), 16000}), InputError);
  CHECK_THROWS_AS(normalize_level({{}, 16000}), InputError);
  CHECK(std::isinf(level_dbov({std::vector<double>(4, 0.0), 16000})));
}

TEST_CASE("manifest") {
  const auto dir = scratch("manifest");
  {
    std::ofstream(dir / "a.wav") << "x";
    std::ofstream(dir / "a.vblf") << "x";
  }
  DatasetManifest m;
  m.utterances = {{"a", dir / "a.wav", dir / "a.vblf", Split::test}};
  save_manifest(dir / "m.json", m);
  CHECK(read_text(dir / "m.json").find("\"wav\": \"a.wav\"") != std::string::npos);
  const auto back = load_manifest(dir / "m.json");
  REQUIRE(back.utterances.size() == 1);
  CHECK(back.utterances[0].wav == dir / "a.wav");
  CHECK(back.in_split(Split::test).size() == 1);
  CHECK(back.in_split(Split::train).empty());

  m.utterances.push_back(m.utterances[0]);
  CHECK_THROWS_AS(m.validate(), ConfigError);
  m.utterances.pop_back();
  m.utterances.push_back({"b", dir / "b.wav", dir / "a.vblf", Split::train});
  save_manifest(dir / "m2.json", m);
  CHECK_THROWS_AS(load_manifest(dir / "m2.json"), IoError);
  CHECK_THROWS_AS(parse_split("dev"), ConfigError);
}

TEST_CASE("toy corpus") {
  const auto& c = toy_corpus();
  CHECK(c.manifest.utterances.size() == 5);
  CHECK(c.manifest.in_split(Split::test).size() == 2);
  const auto fc = features::ExtractionConfig{}.frames_for(16000);
  for (const auto& u : c.manifest.utterances) {
    const auto w = signal::read_wav(u.wav);
    const Matrix l = features::read_linguistic(u.linguistic);
    CHECK(l.rows() == signal::frame_count(w.size(), fc));
    CHECK(l.cols() == synthetic_linguistic_dim());
    for (std::size_t n = 0; n < l.rows(); ++n) {
      double s = 0.0;
      for (std::size_t p = 0; p < toy_phone_count(); ++p) s += l(n, p);
      CHECK(s == 1.0);
    }
  }
  ToyCorpusConfig tc;
  const auto a = make_toy_utterance(tc, 9), b = make_toy_utterance(tc, 9);
  CHECK(a.wave.samples == b.wave.samples);
  CHECK(make_toy_utterance(tc, 10).wave.samples != a.wave.samples);
}

TEST_CASE("extract: rate arithmetic, idempotence, per-file failures") {
  Quiet quiet;
  const auto dir = scratch("extract");
  // 1 s at 48 kHz: hop 240, frame 2048, (48000 - 2048) / 240 + 1 = 192 frames.
  fs::create_directories(dir / "c");
  signal::write_wav(dir / "c/ok.wav", {vbtest::harmonic_tone(48000, 150.0, 48000.0), 48000});
  signal::write_wav(dir / "c/bad.wav", {vbtest::harmonic_tone(48000, 150.0, 48000.0), 48000});
  fs::resize_file(dir / "c/bad.wav", 1000);  // header promises more data than is present
  std::ofstream(dir / "c/x.vblf") << "x";
  DatasetManifest m;
  m.utterances = {{"ok", dir / "c/ok.wav", dir / "c/x.vblf", Split::train},
                  {"bad", dir / "c/bad.wav", dir / "c/x.vblf", Split::train}};
  ExperimentConfig cfg = toy_experiment_config();
  cfg.output_dir = dir / "out";

  auto r = cmd_extract(cfg, m);
  CHECK(r.exit_code() == 1);
  REQUIRE(r.failures.size() == 1);
  CHECK(r.failures[0].id == "bad");
  CHECK(read_text(dir / "out/features/failures.json").find("\"bad\"") != std::string::npos);
  const auto stored = features::read_features(Workspace{cfg.output_dir}.feature_path("ok"));
  CHECK(stored.features.frames() == 192);
  CHECK(stored.sidecar.at("sample_rate") == 48000);

  const auto before = fs::last_write_time(Workspace{cfg.output_dir}.feature_path("ok"));
  r = cmd_extract(cfg, m);
  CHECK(r.written == 0);
  CHECK(r.skipped == 1);
  CHECK(fs::last_write_time(Workspace{cfg.output_dir}.feature_path("ok")) == before);

  // Changed settings invalidate the store.
  cfg.extraction.mgc_alpha = 0.5;
  CHECK(cmd_extract(cfg, m).written == 1);
}

TEST_CASE("train, synthesize and report on the toy corpus") {
  Quiet quiet;
  const auto& corpus = toy_corpus();
  const auto out = scratch("run");
  auto cfg = fast_config(corpus.dir, out);
  const Workspace ws{out};

  CHECK_THROWS_WITH_AS(cmd_train(cfg, corpus.manifest), doctest::Contains("utt001"), InputError);
  REQUIRE(cmd_extract(cfg, corpus.manifest).exit_code() == 0);
  CHECK_THROWS_WITH_AS(cmd_synthesize(cfg, corpus.manifest), doctest::Contains("model sar"), InputError);

  for (Method m : all_methods()) {
    cfg.method = m;
    cfg.acoustic.kind = acoustic_kind(m);
    CHECK(cmd_train(cfg, corpus.manifest).exit_code() == 0);
    CHECK(cmd_synthesize(cfg, corpus.manifest).exit_code() == 0);
  }
  CHECK(fs::exists(ws.model_path("sar")));
  CHECK(fs::exists(ws.model_path("gan-rnn")));
  CHECK(fs::exists(ws.model_path("wavenet")));

  // One loss row per step.
  std::ifstream loss(ws.loss_path("sar"));
  std::string line;
  std::size_t rows = 0;
  std::getline(loss, line);
  CHECK(line == "step,loss");
  while (std::getline(loss, line)) ++rows;
  CHECK(rows == cfg.acoustic.steps);

  // Re-running train with unchanged inputs keeps the checkpoints.
  cfg.method = Method::sar_wo;
  cfg.acoustic.kind = acoustic::AcousticKind::sar;
  CHECK(cmd_train(cfg, corpus.manifest).skipped == 2);

  const auto test = corpus.manifest.in_split(Split::test);
  for (const Utterance* u : test) {
    // SAR-Wo, SAR-Pr and SAR-Wa share the generated features.
    const auto h = hash_file(ws.gen_path("SAR-Wo", u->id));
    CHECK(hash_file(ws.gen_path("SAR-Pr", u->id)) == h);
    CHECK(hash_file(ws.gen_path("SAR-Wa", u->id)) == h);
    CHECK(hash_file(ws.gen_path("SGA-Wo", u->id)) != h);

    const auto wo = signal::read_wav(ws.wav_path("SAR-Wo", u->id));
    const auto pr = signal::read_wav(ws.wav_path("SAR-Pr", u->id));
    const auto wa = signal::read_wav(ws.wav_path("SAR-Wa", u->id));
    CHECK(wa.sample_rate == 16000);
    REQUIRE(wo.size() == pr.size());
    CHECK(wo.samples != pr.samples);
    const vocoder::GriffinLimConfig glc;
    const double e = vocoder::spectral_convergence(signal::magnitude(signal::stft(pr, glc.stft)),
                                                   signal::magnitude(signal::stft(wo, glc.stft)));
    CHECK(e < 0.1);
    for (const auto& w : {wo, pr, wa}) CHECK(std::abs(20 * std::log10(signal::rms(w)) + 26.0) < 0.01);
  }

  // Worker count does not change the output.
  auto par = cfg;
  par.output_dir = scratch("run_workers");
  fs::copy(out / "features", par.output_dir / "features");
  fs::copy(out / "models", par.output_dir / "models");
  par.workers = 3;
  par.method = Method::sar_pr;
  REQUIRE(cmd_synthesize(par, corpus.manifest).exit_code() == 0);
  for (const Utterance* u : test)
    CHECK(hash_file(Workspace{par.output_dir}.wav_path("SAR-Pr", u->id)) == hash_file(ws.wav_path("SAR-Pr", u->id)));

  CHECK(cmd_normalize(cfg, corpus.manifest).exit_code() == 0);
  CHECK(cmd_report(cfg, corpus.manifest).exit_code() == 0);
  // One GV row per MGC dimension per system, natural GV straight from the metrics module.
  std::ifstream gv(ws.report_dir() / "gv.csv");
  std::getline(gv, line);
  CHECK(line == "system,dim,variance");
  std::map<std::string, std::size_t> per_system;
  std::vector<double> natural;
  while (std::getline(gv, line)) {
    const auto c1 = line.find(','), c2 = line.rfind(',');
    const std::string sys = line.substr(0, c1);
    ++per_system[sys];
    if (sys == "natural") natural.push_back(std::strtod(line.c_str() + c2 + 1, nullptr));
  }
  CHECK(per_system.size() == 7);
  for (const auto& [sys, n] : per_system) CHECK(n == cfg.extraction.mgc_order);
  std::vector<Matrix> mgc;
  for (const Utterance* u : test) mgc.push_back(features::read_features(ws.feature_path(u->id)).features.mgc.coeffs);
  CHECK(natural == metrics::global_variance(mgc).mean);

  const auto report = nlohmann::json::parse(read_text(ws.report_dir() / "report.json"));
  CHECK(report.at("gv_order").contains("rnn_le_sar_fraction"));
  CHECK(report.at("systems").at("SAR-Wa").contains("if_voiced_deviation_std_hz"));
  CHECK(fs::exists(metrics::report_path(ws.report_dir() / "if" / "SAR-Wa", test[0]->id, "if")));
  CHECK(read_text(ws.report_dir() / "ms.csv").find("natural,11,0,") != std::string::npos);
}

TEST_CASE("training is deterministic") {
  Quiet quiet;
  const auto& corpus = toy_corpus();
  std::vector<std::string> hashes;
  for (const char* name : {"det_a", "det_b"}) {
    auto cfg = fast_config(corpus.dir, scratch(name));
    cfg.method = Method::sga_wo;
    cfg.acoustic.kind = acoustic::AcousticKind::sar;
    REQUIRE(cmd_extract(cfg, corpus.manifest).exit_code() == 0);
    REQUIRE(cmd_train(cfg, corpus.manifest).exit_code() == 0);
    std::string h;
    for (const auto& m : required_models(cfg.method)) h += hash_hex(hash_file(Workspace{cfg.output_dir}.model_path(m)));
    hashes.push_back(h);
  }
  CHECK(hashes[0] == hashes[1]);
}

TEST_CASE("48 kHz analysis: Wavenet output at 16 kHz, the others at the analysis rate") {
  Quiet quiet;
  const auto dir = scratch("hi_rate");
  ToyCorpusConfig tc;
  tc.utterances = 2;
  tc.validation = 0;
  tc.test = 1;
  tc.sample_rate = 48000;
  tc.min_seconds = 0.4;
  tc.max_seconds = 0.5;
  const auto m = write_toy_corpus(dir / "corpus", tc, features::ExtractionConfig{});
  auto cfg = fast_config(dir / "corpus", dir / "out");
  REQUIRE(cmd_extract(cfg, m).exit_code() == 0);
  for (Method method : {Method::sar_wo, Method::sar_wa}) {
    cfg.method = method;
    REQUIRE(cmd_train(cfg, m).exit_code() == 0);
    REQUIRE(cmd_synthesize(cfg, m).exit_code() == 0);
  }
  const std::string id = m.in_split(Split::test)[0]->id;
  CHECK(signal::read_wav(Workspace{cfg.output_dir}.wav_path("SAR-Wo", id)).sample_rate == 48000);
  CHECK(signal::read_wav(Workspace{cfg.output_dir}.wav_path("SAR-Wa", id)).sample_rate == 16000);
}

#ifdef VB_CLI_PATH
TEST_CASE("cli exit codes") {
  const auto& corpus = toy_corpus();
  const auto dir = scratch("cli");
  auto cfg = fast_config(corpus.dir, dir / "out");
  save_config(dir / "exp.conf", cfg);
  const std::string cli = VB_CLI_PATH;
  const std::string conf = (dir / "exp.conf").string();
  const auto run = [&](const std::string& args) {
    const int status = std::system((cli + " " + args + " 2>/dev/null").c_str());
    return WEXITSTATUS(status);
  };
  CHECK(run("") == 2);
  CHECK(run("extract") == 2);
  CHECK(run("extract --config " + conf + " --method SAR-Pm") == 2);
  CHECK(run("extract --config " + conf + " --method Foo") == 2);
  CHECK(run("extract --config " + conf + " --workers 0") == 2);
  CHECK(run("extract --config " + conf + " --workers 2 --seed 4") == 0);
  CHECK(run("synthesize --config " + conf) == 1);  // no checkpoints yet
  CHECK(run("--help") == 0);
}
#endif
