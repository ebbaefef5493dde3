// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance harness: one line per criterion, exit 1 if any hard criterion
// fails. Soft criteria report WARN instead of FAIL.
//
//   acceptance [--only 3,9] [--work DIR]

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "test_util.hpp"
#include "vb/acoustic/models.hpp"
#include "vb/common/log.hpp"
#include "vb/features/cepstrum.hpp"
#include "vb/features/extract.hpp"
#include "vb/features/feature_store.hpp"
#include "vb/metrics/metrics.hpp"
#include "vb/nn/gradient_check.hpp"
#include "vb/pipeline/commands.hpp"
#include "vb/pipeline/level.hpp"
#include "vb/pipeline/toy_corpus.hpp"
#include "vb/signal/fft.hpp"
#include "vb/signal/mulaw.hpp"
#include "vb/signal/stft.hpp"
#include "vb/signal/wav_io.hpp"
#include "vb/vocoder/griffin_lim.hpp"
#include "vb/vocoder/source_filter.hpp"
#include "vb/wavenet/wavenet.hpp"

using namespace vb;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  bool soft;
  std::function<Outcome()> run;
};

template <class... Args>
std::string fmt(const char* f, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

fs::path g_work;

// 1 ------------------------------------------------------------------------

Outcome dft_oracle() {
  Rng rng(101);
  std::uniform_int_distribution<std::size_t> len(4, 512);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const auto x = vbtest::random_vector(rng, len(rng));
    const auto fast = signal::dft_forward(x);
    // Direct O(n^2) summation, independent of the library.
    const std::size_t n = x.size();
    for (std::size_t f = 0; f < fast.size(); ++f) {
      std::complex<double> s = 0.0;
      for (std::size_t t = 0; t < n; ++t) {
        const double ang = -2.0 * std::numbers::pi * static_cast<double>((f * t) % n) / static_cast<double>(n);
        s += x[t] * std::complex<double>(std::cos(ang), std::sin(ang));
      }
      worst = std::max(worst, std::abs(fast[f] - s));
    }
  }
  return {worst < 1e-10, fmt("max |fft - direct| = %.2e over 200 frames", worst)};
}

// 2 ------------------------------------------------------------------------

Outcome mulaw_scan() {
  bool ok = true;
  double worst_ratio = 0.0;
  for (int levels : {256, 1024}) {
    const double mu = levels - 1.0;
    int prev = -1;
    for (int i = 0; i <= 10000; ++i) {
      const double x = -1.0 + 2.0 * i / 10000.0;
      signal::Waveform w{{x}, 16000};
      const auto q = signal::mu_law_encode(w, levels, mu);
      const int level = q.levels[0];
      const double y = signal::mu_law_decode(q).samples[0];
      ok &= level >= prev;
      prev = level;
      // Step width of this level from the closed-form companding inverse.
      const auto expand = [&](double c) { return (c < 0 ? -1.0 : 1.0) * (std::pow(1.0 + mu, std::abs(c)) - 1.0) / mu; };
      const double lo = expand(-1.0 + 2.0 * level / levels), hi = expand(-1.0 + 2.0 * (level + 1) / levels);
      const double step = hi - lo;
      worst_ratio = std::max(worst_ratio, std::abs(y - x) / step);
    }
  }
  ok &= worst_ratio <= 1.0 + 1e-12;
  return {ok, fmt("monotone, max |decode - x| = %.3f steps (L = 256, 1024)", worst_ratio)};
}

// 3, 4 ----------------------------------------------------------------------

signal::PowerSpectrum random_power(Rng& rng, std::size_t bins) {
  signal::PowerSpectrum p{Matrix(1, bins)};
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double a0 = u(rng), a1 = u(rng), a2 = u(rng), ph = 3 * u(rng);
  for (std::size_t f = 0; f < bins; ++f) {
    const double w = std::numbers::pi * f / (bins - 1);
    p.values(0, f) = std::exp(2.0 * (a0 + a1 * std::cos(w + ph) + 0.5 * a2 * std::cos(3 * w) + 0.5 * u(rng)));
  }
  return p;
}

Outcome cepstral_bijection() {
  Rng rng(303);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const std::size_t bins = (i % 2 ? 257 : 129);
    const auto p = random_power(rng, bins);
    const auto c = features::cepstral_analysis(p, bins, 0.0);
    const auto amp = features::cepstra_to_amplitude(c, bins);
    for (std::size_t f = 0; f < bins; ++f) {
      const double ref = std::sqrt(p.values(0, f));
      worst = std::max(worst, std::abs(amp(0, f) - ref) / ref);
    }
    // and back: amplitude -> cepstra reproduces c
    signal::PowerSpectrum p2{Matrix(1, bins)};
    for (std::size_t f = 0; f < bins; ++f) p2.values(0, f) = amp(0, f) * amp(0, f);
    const auto c2 = features::cepstral_analysis(p2, bins, 0.0);
    for (std::size_t m = 0; m < bins; ++m) worst = std::max(worst, std::abs(c2.coeffs(0, m) - c.coeffs(0, m)));
  }
  return {worst < 1e-8, fmt("max round-trip error %.2e on 100 spectra", worst)};
}

Outcome minimum_phase() {
  Rng rng(404);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const std::size_t bins = (i % 2 ? 513 : 257);
    const auto p = random_power(rng, bins);
    Matrix amp(1, bins);
    for (std::size_t f = 0; f < bins; ++f) amp(0, f) = std::sqrt(p.values(0, f));
    const auto mp = features::minimum_phase_spectrum(amp);
    for (std::size_t f = 0; f < bins; ++f) worst = std::max(worst, std::abs(std::abs(mp.at(0, f)) - amp(0, f)));
  }
  return {worst < 1e-6, fmt("max ||H| - A| = %.2e on 100 amplitudes", worst)};
}

// 5 -------------------------------------------------------------------------

Outcome gradient_checks() {
  Rng rng(505);
  std::uniform_int_distribution<std::size_t> dim(1, 5), small(1, 3);
  double worst = 0.0;
  std::size_t checks = 0;
  const nn::LayerKind kinds[] = {nn::LayerKind::linear,       nn::LayerKind::ff_tanh,
                                 nn::LayerKind::uni_recurrent, nn::LayerKind::bi_recurrent,
                                 nn::LayerKind::conv1d,        nn::LayerKind::dilated_causal_block,
                                 nn::LayerKind::softmax_head,  nn::LayerKind::gaussian_head};
  for (auto kind : kinds) {
    for (int shape = 0; shape < 20; ++shape) {
      nn::LayerSpec s;
      s.kind = kind;
      s.in = dim(rng);
      s.out = kind == nn::LayerKind::softmax_head ? 1 + dim(rng) : dim(rng);
      if (kind == nn::LayerKind::conv1d) s.width = 2 * small(rng) - 1;
      if (kind == nn::LayerKind::dilated_causal_block) {
        s.out = s.in;
        s.skip = dim(rng);
        s.dilation = small(rng);
        s.cond = rng() % 3;
        s.upsample = s.cond ? small(rng) : 1;
      }
      const auto report = nn::gradient_check(s, 1, rng());
      worst = std::max(worst, report.max_rel_error());
      ++checks;
    }
  }
  return {worst < 1e-4, fmt("max relative error %.2e over %zu layer shapes (8 kinds x 20)", worst, checks)};
}

// 6, 7 ----------------------------------------------------------------------

Outcome sar_reduction() {
  Rng rng(606);
  std::uniform_int_distribution<std::size_t> dim(1, 6), frames(1, 15), order(0, 3);
  std::size_t equal = 0;
  for (int i = 0; i < 20; ++i) {
    const std::size_t in = dim(rng), out = dim(rng), n = frames(rng);
    auto net = acoustic::make_acoustic_network(in, out, {dim(rng) + 2, 1 + rng() % 2, dim(rng), dim(rng)});
    net.init(rng());
    std::vector<acoustic::SarStream> streams;
    for (std::size_t first = 0; first < out;) {
      const std::size_t count = 1 + rng() % (out - first);
      streams.push_back({first, count, order(rng)});
      first += count;
    }
    acoustic::SarParameters sar(out, streams);
    for (std::size_t s = 0; s < streams.size(); ++s) sar.beta(s).value.fill(0.0);
    sar.gamma.value.fill(0.0);
    const Matrix l = vbtest::random_matrix(rng, n, in), a = vbtest::random_matrix(rng, n, out);
    const bool same = acoustic::sar_nll(net, sar, l, a) == acoustic::rnn_nll(net, l, a) &&
                      acoustic::sar_generate(net, sar, l) == acoustic::rnn_generate(net, l);
    equal += same;
  }
  return {equal == 20, fmt("%zu / 20 cases bit-equal (loss and generation)", equal)};
}

Outcome sar_recursion() {
  const std::size_t N = 200, d = 4;
  acoustic::SarParameters sar(d, {{0, d, 1}});
  sar.beta(0).value.fill(0.5);
  sar.gamma.value.fill(0.0);
  const Matrix g = acoustic::sar_generate_from(Matrix(N, d, 1.0), sar);
  double worst = 0.0;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < d; ++j)
      worst = std::max(worst, std::abs(g(i, j) - (2.0 - std::pow(2.0, 1.0 - static_cast<double>(i + 1)))));
  return {worst < 1e-12, fmt("max |a_n - (2 - 2^(1-n))| = %.2e over %zu frames", worst, N)};
}

// 8 -------------------------------------------------------------------------

wavenet::ConditioningTrack random_track(const wavenet::WavenetConfig& cfg, std::size_t frames, std::uint64_t seed) {
  Rng rng(seed);
  wavenet::ConditioningTrack c;
  c.factor = cfg.upsample;
  c.mgc = vbtest::random_matrix(rng, frames, cfg.mgc_dims);
  for (std::size_t n = 0; n < frames; ++n) c.qf0.push_back(static_cast<int>(rng() % 256));
  return c;
}

Outcome wavenet_receptive_field() {
  const auto cfg = wavenet::WavenetConfig::full();
  // Oracle: 1 + sum over 40 blocks of 2^(k mod 10) = 1 + 4 * 1023.
  std::size_t oracle = 1;
  for (std::size_t k = 0; k < cfg.blocks; ++k) oracle += std::size_t{1} << (k % 10);
  const std::size_t R = wavenet::receptive_field(cfg);

  wavenet::Wavenet fresh(cfg, 7);
  const auto cond = random_track(cfg, (R + 40) / cfg.upsample + 1, 8);
  Rng rng(9);
  signal::QuantizedWave q{std::vector<int>(cond.samples()), cfg.levels, cfg.mu, cfg.sample_rate};
  for (int& v : q.levels) v = static_cast<int>(rng() % static_cast<unsigned>(cfg.levels));
  const double nll = wavenet::wavenet_nll(fresh, q, cond);

  // Perturb o_0 and find the span of outputs that move.
  wavenet::Wavenet m(cfg, 7);
  m.randomize_output_layer(10);
  const Matrix base = m.log_probs(q.levels, cond);
  auto pert = q.levels;
  pert[0] = (pert[0] + 17) % cfg.levels;
  const Matrix moved = m.log_probs(pert, cond);
  long first = -1, last = -1;
  for (std::size_t t = 0; t < base.rows(); ++t) {
    auto a = base.row(t), b = moved.row(t);
    if (!std::equal(a.begin(), a.end(), b.begin())) {
      if (first < 0) first = static_cast<long>(t);
      last = static_cast<long>(t);
    }
  }
  const bool ok = R == 4093 && oracle == 4093 && first == 1 && last == static_cast<long>(R) &&
                  std::abs(nll - std::log(1024.0)) < 1e-3;
  return {ok, fmt("R = %zu, perturbed outputs %ld..%ld, fresh NLL - ln 1024 = %.1e", R, first, last,
                  nll - std::log(1024.0))};
}

// 9, 14 ---------------------------------------------------------------------

struct Overfit {
  wavenet::Wavenet model;
  wavenet::WavenetExample ex;
  double accuracy = 0.0;
};

// Periodic two-formant vowel (125 Hz, exact 128-sample period), one second
// at 16 kHz with fully voiced constant conditioning.
Overfit& overfit() {
  static std::optional<Overfit> o;
  if (o) return *o;
  wavenet::WavenetConfig cfg;
  cfg.blocks = 8;
  cfg.residual = 24;
  cfg.skip = 24;
  cfg.post = 64;
  cfg.mgc_dims = 4;
  cfg.f0_embedding = 8;
  const signal::Waveform w{vbtest::formant_vowel(16000, 16000.0, 125.0), 16000};
  const auto q = signal::mu_law_encode(w, cfg.levels, cfg.mu);
  auto ex = wavenet::make_example(q, wavenet::constant_conditioning(200, cfg.mgc_dims, 128, cfg.upsample));
  wavenet::Wavenet m(cfg, 11);
  wavenet::WavenetTrainConfig tc;
  tc.steps = 600;
  tc.segment = 1600;
  tc.opt = {nn::OptimizerKind::adam, 3e-3};
  tc.seed = 12;
  wavenet::wavenet_train(m, {ex}, tc);
  const double acc = wavenet::wavenet_accuracy(m, ex.q, ex.cond);
  o.emplace(Overfit{std::move(m), std::move(ex), acc});
  return *o;
}

Outcome wavenet_overfit() {
  auto& o = overfit();
  std::vector<std::vector<int>> runs;
  for (std::uint64_t seed : {1u, 2u, 99u})
    runs.push_back(wavenet::wavenet_generate(o.model, o.ex.cond, {wavenet::VoicedMode::greedy, seed}).levels);
  const bool invariant = runs[0] == runs[1] && runs[0] == runs[2];
  return {o.accuracy >= 0.95 && invariant,
          fmt("teacher-forced accuracy %.4f, greedy output %s across 3 seeds", o.accuracy,
              invariant ? "bit-identical" : "differs")};
}

Outcome if_regularity() {
  auto& o = overfit();
  const signal::FrameConfig fc{1024, 256, signal::WindowType::hann};
  const auto std_for = [&](wavenet::VoicedMode mode) {
    const auto q = wavenet::wavenet_generate(o.model, o.ex.cond, {mode, 21});
    const auto map = metrics::instantaneous_frequency(signal::mu_law_decode(q), fc);
    return metrics::if_deviation_std(map, std::vector<bool>(map.deviation_hz.rows(), true), -40.0);
  };
  const double greedy = std_for(wavenet::VoicedMode::greedy), random = std_for(wavenet::VoicedMode::random);
  const auto nat = metrics::instantaneous_frequency(signal::mu_law_decode(o.ex.q), fc);
  const double natural = metrics::if_deviation_std(nat, std::vector<bool>(nat.deviation_hz.rows(), true), -40.0);
  return {greedy < random, fmt("voiced IF deviation std: greedy %.2f Hz, random %.2f Hz (training clip %.2f Hz)",
                               greedy, random, natural)};
}

// 10, 11, 12 ----------------------------------------------------------------

Outcome griffin_lim() {
  vocoder::GriffinLimConfig glc;
  Rng rng(1010);
  double worst_rise = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < 50; ++i) {
    const Matrix target = vbtest::random_matrix(rng, 10 + rng() % 20, glc.stft.frame_length / 2 + 1, 0.0, 2.0);
    glc.seed = i;
    const auto r = vocoder::griffin_lim(target, glc);
    for (std::size_t k = 1; k < r.errors.size(); ++k) worst_rise = std::max(worst_rise, r.errors[k] - r.errors[k - 1]);
  }
  // Consistent magnitudes: STFT of a speech-like vowel with vibrato and breath noise.
  const signal::Waveform x{vbtest::formant_vowel(15872, 16000.0, 120.0, 0.05, 0.05), 16000};
  const Matrix target = signal::magnitude(signal::stft(x, glc.stft));
  glc = {};
  const auto r = vocoder::griffin_lim(target, glc);
  const double e60 = r.errors.back();
  return {worst_rise <= 1e-7 && r.errors.size() == 61 && e60 < 0.1,
          fmt("max E_i - E_{i-1} = %.1e on 50 random targets, E_60 = %.4f on a consistent target", worst_rise, e60)};
}

Outcome analysis_synthesis() {
  const signal::Waveform vowel{vbtest::formant_vowel(16000, 16000.0, 120.0), 16000};
  features::ExtractionConfig ec;
  const auto a = features::analyze(vowel, ec);
  const auto y = vocoder::source_filter_synthesize(a.mgc, a.f0, a.bap, vocoder::SynthesisConfig{});
  const auto b = features::analyze(y, ec);
  const std::size_t bins = ec.frames_for(16000).frame_length / 2 + 1;
  const auto ea = features::cepstra_to_amplitude(a.mgc, bins), eb = features::cepstra_to_amplitude(b.mgc, bins);
  // Voiced frames away from the edges.
  std::vector<double> ra, rb;
  for (std::size_t n = 10; n + 10 < std::min(a.frames(), b.frames()); ++n) {
    if (a.f0.f0[n] <= 0.0) continue;
    ra.insert(ra.end(), ea.row(n).begin(), ea.row(n).end());
    rb.insert(rb.end(), eb.row(n).begin(), eb.row(n).end());
  }
  const std::size_t rows = ra.size() / bins;
  if (rows == 0) return {false, "no voiced frames"};
  const double lsd = metrics::log_spectral_distortion(Matrix(rows, bins, ra), Matrix(rows, bins, rb));
  return {lsd < 3.0, fmt("envelope LSD %.3f dB over %zu voiced frames", lsd, rows)};
}

Outcome level_normalization() {
  Rng rng(1212);
  std::uniform_real_distribution<double> amp(0.001, 0.9);
  std::uniform_int_distribution<std::size_t> len(200, 48000);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double a = amp(rng);
    const auto x = vbtest::random_vector(rng, len(rng), -a, a);
    const auto r = pipeline::normalize_level({x, 16000});
    // RMS against the full-scale square wave (RMS 1.0).
    double s = 0.0;
    for (double v : r.wave.samples) s += v * v;
    const double dbov = 10.0 * std::log10(s / static_cast<double>(r.wave.size()));
    worst = std::max(worst, std::abs(dbov + 26.0));
  }
  return {worst <= 0.01, fmt("max |level + 26| = %.2e dB on 20 signals", worst)};
}

// 13, 15 --------------------------------------------------------------------

struct PipelineRun {
  fs::path out;
  pipeline::DatasetManifest manifest;
  bool ok = true;
  std::string error;
};

PipelineRun run_pipeline(const fs::path& corpus, const pipeline::DatasetManifest& m, const fs::path& out) {
  PipelineRun run{out, m, true, {}};
  auto cfg = pipeline::toy_experiment_config();
  cfg.manifest = corpus / "manifest.json";
  cfg.output_dir = out;
  try {
    run.ok &= pipeline::cmd_extract(cfg, m).exit_code() == 0;
    for (auto method : pipeline::all_methods()) {
      cfg.method = method;
      cfg.acoustic.kind = pipeline::acoustic_kind(method);
      run.ok &= pipeline::cmd_train(cfg, m).exit_code() == 0;
      run.ok &= pipeline::cmd_synthesize(cfg, m).exit_code() == 0;
    }
  } catch (const std::exception& e) {
    run.ok = false;
    run.error = e.what();
  }
  return run;
}

const pipeline::DatasetManifest& toy_manifest() {
  static const auto m = [] {
    fs::remove_all(g_work / "corpus");
    return pipeline::write_toy_corpus(g_work / "corpus", pipeline::ToyCorpusConfig{}, features::ExtractionConfig{});
  }();
  return m;
}

PipelineRun& first_run() {
  static PipelineRun r = [] {
    fs::remove_all(g_work / "run_a");
    return run_pipeline(g_work / "corpus", toy_manifest(), g_work / "run_a");
  }();
  return r;
}

Outcome gv_ordering() {
  const auto& run = first_run();
  if (!run.ok) return {false, "pipeline failed: " + run.error};
  const pipeline::Workspace ws{run.out};
  std::vector<Matrix> rnn, sar;
  for (const auto* u : run.manifest.in_split(pipeline::Split::test)) {
    rnn.push_back(features::read_features(ws.gen_path("RNN-Wo", u->id)).features.mgc.coeffs);
    sar.push_back(features::read_features(ws.gen_path("SAR-Wo", u->id)).features.mgc.coeffs);
  }
  const auto gr = metrics::global_variance(rnn).mean, gs = metrics::global_variance(sar).mean;
  std::size_t hold = 0;
  for (std::size_t j = 0; j < gr.size(); ++j) hold += gs[j] >= gr[j];
  const double frac = static_cast<double>(hold) / static_cast<double>(gr.size());
  return {frac >= 0.7, fmt("SAR GV >= RNN GV on %zu / %zu MGC dims (%.1f%%), 10 utterances", hold, gr.size(),
                           100.0 * frac)};
}

Outcome determinism() {
  const auto& a = first_run();
  fs::remove_all(g_work / "run_b");
  const auto b = run_pipeline(g_work / "corpus", toy_manifest(), g_work / "run_b");
  if (!a.ok || !b.ok) return {false, "pipeline failed: " + a.error + b.error};
  std::size_t files = 0, same = 0;
  for (const auto& entry : fs::recursive_directory_iterator(a.out / "wav")) {
    if (!entry.is_regular_file()) continue;
    const auto rel = fs::relative(entry.path(), a.out);
    ++files;
    same += fs::exists(b.out / rel) && pipeline::hash_file(entry.path()) == pipeline::hash_file(b.out / rel);
  }
  return {files == 12 && same == files, fmt("%zu / %zu WAVs bit-identical across two runs (6 methods)", same, files)};
}

std::vector<Criterion> criteria() {
  return {
      {1, "dft-oracle", 10, false, dft_oracle},
      {2, "mulaw-scan", 5, false, mulaw_scan},
      {3, "cepstral-bijection", 10, false, cepstral_bijection},
      {4, "minimum-phase", 10, false, minimum_phase},
      {5, "gradient-checks", 120, false, gradient_checks},
      {6, "sar-rnn-reduction", 10, false, sar_reduction},
      {7, "sar-recursion", 1, false, sar_recursion},
      {8, "wavenet-receptive-field", 60, false, wavenet_receptive_field},
      {9, "wavenet-overfit", 900, false, wavenet_overfit},
      {10, "griffin-lim", 60, false, griffin_lim},
      {11, "analysis-synthesis", 10, false, analysis_synthesis},
      {12, "level-normalization", 5, false, level_normalization},
      {13, "gv-ordering", 1200, true, gv_ordering},
      {14, "if-regularity", 300, true, if_regularity},
      {15, "determinism", 1800, false, determinism},
  };
}

std::set<int> parse_only(const std::string& s) {
  std::set<int> ids;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) ids.insert(std::stoi(item));
  return ids;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::string only;
  std::string work = (fs::temp_directory_path() / "vb_acceptance").string();
  app.add_option("--only", only, "Comma-separated criterion ids");
  app.add_option("--work", work, "Scratch directory for the pipeline runs");
  CLI11_PARSE(app, argc, argv);
  const auto selected = parse_only(only);
  g_work = work;
  fs::create_directories(g_work);
  log::set_level(log::Level::warn);

  int hard_failures = 0;
  for (const auto& c : criteria()) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    // Shared work (the overfit model, the first pipeline run) is charged to the
    // first criterion that needs it.
    const bool in_time = secs <= c.budget_s;
    const bool passed = o.passed && in_time;
    const char* status = passed ? "PASS" : (c.soft ? "WARN" : "FAIL");
    if (!passed && !c.soft) ++hard_failures;
    std::printf("%s %2d %-24s %s (%.2f s, budget %.0f s%s)\n", status, c.id, c.name, o.detail.c_str(), secs,
                c.budget_s, in_time ? "" : ", over budget");
    std::fflush(stdout);
  }
  return hard_failures == 0 ? 0 : 1;
}
