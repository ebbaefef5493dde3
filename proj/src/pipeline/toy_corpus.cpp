// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#include "vb/pipeline/toy_corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "vb/common/error.hpp"
#include "vb/common/rng.hpp"
#include "vb/features/feature_store.hpp"
#include "vb/signal/wav_io.hpp"

namespace fs = std::filesystem;

namespace vb::pipeline {
namespace {

struct Phone {
  double f1, f2, b1, b2, amp;
  bool voiced;
};

constexpr Phone kPhones[] = {
    {730, 1090, 80, 120, 1.0, true},    // a
    {270, 2290, 60, 120, 0.8, true},    // i
    {300, 870, 60, 100, 0.8, true},     // u
    {530, 1840, 70, 120, 0.9, true},    // e
    {570, 840, 70, 100, 0.9, true},     // o
    {250, 1200, 100, 300, 0.4, true},   // m
    {2500, 4500, 400, 600, 0.3, false}, // s
    {500, 1500, 100, 100, 0.0, false},  // silence
};
constexpr std::size_t kSilence = 7;

// Two-pole resonator with unit gain at its centre frequency.
struct Resonator {
  double y1 = 0.0, y2 = 0.0;
  double step(double x, double fc, double bw, double sr) {
    const double r = std::exp(-std::numbers::pi * bw / sr);
    const double th = 2.0 * std::numbers::pi * fc / sr;
    const double g = (1.0 - r) * std::sqrt(1.0 - 2.0 * r * std::cos(2.0 * th) + r * r);
    const double y = g * x + 2.0 * r * std::cos(th) * y1 - r * r * y2;
    y2 = y1;
    y1 = y;
    return y;
  }
};

}  // namespace

std::size_t toy_phone_count() { return std::size(kPhones); }
bool toy_phone_voiced(std::size_t phone) { return kPhones[phone].voiced; }
std::size_t synthetic_linguistic_dim() { return toy_phone_count() + 3; }

Matrix synthetic_linguistic(const std::vector<PhoneSegment>& phones, std::size_t total_samples,
                            const signal::FrameConfig& frames) {
  const std::size_t n_frames = signal::frame_count(total_samples, frames);
  Matrix l(n_frames, synthetic_linguistic_dim());
  std::size_t p = 0;
  for (std::size_t n = 0; n < n_frames; ++n) {
    const std::size_t c = n * frames.hop + frames.frame_length / 2;
    while (p + 1 < phones.size() && c >= phones[p].start + phones[p].length) ++p;
    const auto& seg = phones[p];
    const double inside = std::clamp((static_cast<double>(c) - seg.start) / seg.length, 0.0, 1.0);
    l(n, seg.phone) = 1.0;
    l(n, toy_phone_count()) = inside;
    l(n, toy_phone_count() + 1) = static_cast<double>(c) / total_samples;
    l(n, toy_phone_count() + 2) = static_cast<double>(seg.length) / frames.hop / 200.0;
  }
  return l;
}

ToyUtterance make_toy_utterance(const ToyCorpusConfig& cfg, std::uint64_t seed) {
  if (cfg.sample_rate < 8000) throw ConfigError("toy corpus: sample rate below 8 kHz");
  const double sr = cfg.sample_rate;
  Rng rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const auto uniform = [&](double a, double b) { return a + (b - a) * u01(rng); };

  const auto total = static_cast<std::size_t>(uniform(cfg.min_seconds, cfg.max_seconds) * sr);
  ToyUtterance out;
  const auto lead = static_cast<std::size_t>(uniform(0.06, 0.1) * sr);
  const auto tail = static_cast<std::size_t>(uniform(0.06, 0.1) * sr);
  out.phones.push_back({kSilence, 0, lead});
  std::size_t pos = lead;
  std::size_t prev = kSilence;
  while (pos + tail < total) {
    std::size_t ph = 0;
    do {
      ph = static_cast<std::size_t>(u01(rng) * (kSilence + 0.3));
      ph = std::min(ph, kSilence);
    } while (ph == prev);
    auto len = static_cast<std::size_t>(uniform(0.05, 0.15) * sr);
    len = std::min(len, total - tail - pos);
    out.phones.push_back({ph, pos, len});
    pos += len;
    prev = ph;
  }
  out.phones.push_back({kSilence, pos, total - pos});

  // Per-sample targets, smoothed with an 8 ms one-pole so formants glide.
  const double base_f0 = uniform(100.0, 160.0);
  const double wobble_phase = uniform(0.0, 2.0 * std::numbers::pi);
  const double k = 1.0 - std::exp(-1.0 / (0.008 * sr));
  double f1 = kPhones[kSilence].f1, f2 = kPhones[kSilence].f2, b1 = 100, b2 = 100, amp = 0.0, voicing = 0.0;
  double phase = 0.0;
  Resonator r1, r2;
  std::vector<double> x(total);
  std::size_t seg = 0;
  for (std::size_t t = 0; t < total; ++t) {
    while (seg + 1 < out.phones.size() && t >= out.phones[seg].start + out.phones[seg].length) ++seg;
    const Phone& p = kPhones[out.phones[seg].phone];
    f1 += k * (p.f1 - f1);
    f2 += k * (p.f2 - f2);
    b1 += k * (p.b1 - b1);
    b2 += k * (p.b2 - b2);
    amp += k * (p.amp - amp);
    voicing += k * ((p.voiced ? 1.0 : 0.0) - voicing);

    const double time = t / sr;
    const double f0 = base_f0 * (1.0 - 0.25 * t / total) *
                      (1.0 + 0.06 * std::sin(2.0 * std::numbers::pi * 1.5 * time + wobble_phase));
    phase += f0 / sr;
    double pulse = 0.0;
    if (phase >= 1.0) {
      phase -= 1.0;
      pulse = std::sqrt(sr / f0);
    }
    const double noise = gauss(rng);
    const double e = voicing * pulse + (1.0 - voicing) * noise + 0.03 * noise;
    x[t] = amp * r2.step(r1.step(e, f1, b1, sr), f2, b2, sr) + 1e-4 * gauss(rng);
  }
  double peak = 0.0;
  for (double v : x) peak = std::max(peak, std::abs(v));
  if (peak > 0.0)
    for (double& v : x) v *= 0.5 / peak;
  out.wave = {std::move(x), cfg.sample_rate};
  return out;
}

DatasetManifest write_toy_corpus(const fs::path& dir, const ToyCorpusConfig& cfg,
                                 const features::ExtractionConfig& extraction) {
  if (cfg.utterances == 0 || cfg.validation + cfg.test > cfg.utterances)
    throw ConfigError("toy corpus: split sizes exceed the utterance count");
  const auto frames = extraction.frames_for(cfg.sample_rate);
  fs::create_directories(dir / "wav");
  fs::create_directories(dir / "ling");
  DatasetManifest m;
  for (std::size_t i = 0; i < cfg.utterances; ++i) {
    char id[16];
    std::snprintf(id, sizeof id, "utt%03zu", i + 1);
    const auto utt = make_toy_utterance(cfg, derive_seed(cfg.seed, id));
    Utterance u;
    u.id = id;
    u.wav = dir / "wav" / (u.id + ".wav");
    u.linguistic = dir / "ling" / (u.id + ".vblf");
    if (i >= cfg.utterances - cfg.test)
      u.split = Split::test;
    else if (i >= cfg.utterances - cfg.test - cfg.validation)
      u.split = Split::validation;
    signal::write_wav(u.wav, utt.wave);
    features::write_linguistic(u.linguistic, synthetic_linguistic(utt.phones, utt.wave.size(), frames),
                               extraction.frame_rate);
    m.utterances.push_back(std::move(u));
  }
  save_manifest(dir / "manifest.json", m);
  return m;
}

ExperimentConfig toy_experiment_config() {
  ExperimentConfig c;
  c.acoustic.net = {64, 2, 32, 32};
  c.acoustic.opt = {nn::OptimizerKind::adam, 3e-3};
  c.acoustic.steps = 500;
  c.f0.steps = 300;
  c.f0.model.ff_size = 32;
  c.f0.model.bi_size = 16;
  c.f0.model.head_size = 32;
  c.f0.model.opt = {nn::OptimizerKind::adam, 1e-2};
  c.gan.steps = 300;
  c.gan.model.channels = 16;
  c.gan.model.generator_opt = {nn::OptimizerKind::adam, 1e-3};
  c.gan.model.discriminator_opt = {nn::OptimizerKind::adam, 1e-3};
  c.wavenet.blocks = 10;
  c.wavenet.residual = 32;
  c.wavenet.skip = 32;
  c.wavenet.post = 64;
  c.wavenet.f0_embedding = 16;
  c.wavenet_train.steps = 400;
  c.wavenet_train.segment = 1600;
  c.wavenet_train.opt = {nn::OptimizerKind::adam, 3e-3};
  c.validate();
  return c;
}

}  // namespace vb::pipeline
