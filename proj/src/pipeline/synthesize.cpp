// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <memory>
#include <mutex>
#include <optional>

#include "internal.hpp"
#include "vb/common/error.hpp"
#include "vb/common/log.hpp"
#include "vb/common/rng.hpp"
#include "vb/features/feature_store.hpp"
#include "vb/pipeline/commands.hpp"
#include "vb/pipeline/level.hpp"
#include "vb/signal/mulaw.hpp"
#include "vb/signal/wav_io.hpp"
#include "vb/vocoder/griffin_lim.hpp"
#include "vb/vocoder/source_filter.hpp"
#include "vb/wavenet/conditioning.hpp"

namespace fs = std::filesystem;

namespace vb::pipeline {
namespace {

// One worker's private copy of every model the method needs.
struct Models {
  acoustic::AcousticModel acoustic;
  acoustic::F0Model f0;
  std::optional<acoustic::GanPostfilter> gan;
  std::optional<wavenet::Wavenet> wavenet;
};

std::unique_ptr<Models> load_models(const ExperimentConfig& cfg, const Workspace& ws) {
  auto m = std::make_unique<Models>();
  const std::string ac = detail::acoustic_name(acoustic_kind(cfg.method));
  if (!fs::exists(ws.model_path(ac))) throw InputError("missing checkpoint for model " + ac + " (run train)");
  m->acoustic = acoustic::AcousticModel::load(ws.model_path(ac));
  m->f0 = detail::load_f0_model(ws.model_path("f0"));
  if (uses_gan(cfg.method)) m->gan = detail::load_gan(ws.model_path("gan-" + ac));
  if (wave_path(cfg.method) == WavePath::wavenet) {
    if (!fs::exists(ws.model_path("wavenet"))) throw InputError("missing checkpoint for model wavenet (run train)");
    m->wavenet = wavenet::Wavenet::load(ws.model_path("wavenet"));
  }
  return m;
}

features::AcousticFrameSequence generate_features(const ExperimentConfig& cfg, Models& m, const Matrix& l,
                                                  const features::F0Codebook& codebook) {
  Matrix a = m.acoustic.generate(l);
  if (m.gan) a = acoustic::gan_apply(*m.gan, a);
  const std::size_t mgc = cfg.acoustic.mgc_dims;
  features::AcousticFrameSequence seq;
  seq.mgc = {a.col_block(0, mgc), cfg.extraction.mgc_alpha};
  seq.bap.values = a.col_block(mgc, cfg.acoustic.bap_dims);
  for (double& v : seq.bap.values.values()) v = std::clamp(v, 0.0, 1.0);
  seq.qf0 = acoustic::f0_model_generate(m.f0, l);
  seq.f0 = features::dequantize_f0(seq.qf0, codebook, cfg.extraction.frame_rate);
  return seq;
}

signal::Waveform render(const ExperimentConfig& cfg, Models& m, const features::AcousticFrameSequence& seq,
                        int sample_rate, const std::string& id) {
  vocoder::SynthesisConfig sc;
  sc.sample_rate = sample_rate;
  sc.frame_rate = cfg.extraction.frame_rate;
  sc.frame_length = cfg.extraction.frame_length;
  sc.noise_seed = derive_seed(cfg.synthesis_seed, "noise:" + id);
  switch (wave_path(cfg.method)) {
    case WavePath::source_filter:
      return vocoder::source_filter_synthesize(seq.mgc, seq.f0, seq.bap, sc);
    case WavePath::phase_recovery: {
      auto glc = cfg.griffin_lim;
      glc.sample_rate = sample_rate;
      glc.seed = derive_seed(cfg.griffin_lim.seed, id);
      const auto wave = vocoder::source_filter_synthesize(seq.mgc, seq.f0, seq.bap, sc);
      auto r = vocoder::phase_recovery_enhance(wave, glc);
      log::debug("phase_recovery", {{"id", id}, {"e0", r.errors.front()}, {"e_final", r.errors.back()}});
      return std::move(r.wave);
    }
    case WavePath::wavenet: {
      const auto& wc = cfg.wavenet;
      wavenet::ConditioningTrack cond{seq.mgc.coeffs, seq.qf0.levels, wc.upsample};
      const wavenet::GenerationPolicy policy{wavenet::VoicedMode::greedy, derive_seed(cfg.synthesis_seed, "wavenet:" + id)};
      const auto body = signal::mu_law_decode(wavenet::wavenet_generate(*m.wavenet, cond, policy));
      // Same timeline as the source-filter output at the Wavenet rate.
      sc.sample_rate = wc.sample_rate;
      const std::size_t off = detail::wavenet_offset(cfg);
      signal::Waveform out{std::vector<double>(std::max(sc.length_for(seq.frames()), off + body.size()), 0.0),
                           wc.sample_rate};
      std::copy(body.samples.begin(), body.samples.end(), out.samples.begin() + static_cast<long>(off));
      return out;
    }
  }
  throw ConfigError("unhandled waveform path");
}

}  // namespace

CommandResult cmd_synthesize(const ExperimentConfig& cfg, const DatasetManifest& manifest,
                             const std::vector<std::string>& ids) {
  const Workspace ws{cfg.output_dir};
  const std::string system = to_string(cfg.method);
  std::vector<const Utterance*> utts;
  if (ids.empty()) {
    utts = manifest.in_split(Split::test);
  } else {
    for (const auto& id : ids) {
      const Utterance* u = manifest.find(id);
      if (!u) throw ConfigError("unknown utterance id '" + id + "'");
      utts.push_back(u);
    }
  }
  const auto codebook = detail::load_codebook(ws);
  // Fail early, naming the model, before any worker starts.
  for (const auto& name : required_models(cfg.method))
    if (!fs::exists(ws.model_path(name))) throw InputError("missing checkpoint for model " + name + " (run train)");

  CommandResult result;
  std::mutex mu;
  std::vector<std::unique_ptr<Models>> models(std::max<std::size_t>(1, std::min(cfg.workers, utts.size())));
  parallel_for(utts.size(), cfg.workers, [&](std::size_t w, std::size_t i) {
    const Utterance& u = *utts[i];
    try {
      if (!models[w]) models[w] = load_models(cfg, ws);
      const auto ref = detail::load_utterance(ws, u);
      const auto seq = generate_features(cfg, *models[w], ref.linguistic, codebook);
      const auto gen_path = ws.gen_path(system, u.id);
      fs::create_directories(gen_path.parent_path());
      features::write_features(gen_path, seq, {{"system", system}, {"sample_rate", ref.sample_rate}});
      const auto wave = render(cfg, *models[w], seq, ref.sample_rate, u.id);
      const auto level = normalize_level(wave, cfg.target_dbov);
      if (level.clipped > 0) log::warn("clipping", {{"id", u.id}, {"system", system}, {"samples", level.clipped}});
      const auto wav_path = ws.wav_path(system, u.id);
      fs::create_directories(wav_path.parent_path());
      signal::write_wav(wav_path, level.wave, cfg.wav_format);
      std::lock_guard lock(mu);
      ++result.processed;
      ++result.written;
      log::info("synthesized", {{"id", u.id},
                                {"system", system},
                                {"frames", seq.frames()},
                                {"sample_rate", level.wave.sample_rate},
                                {"gain_db", level.gain_db},
                                {"features_hash", hash_hex(hash_file(gen_path))},
                                {"wav_hash", hash_hex(hash_file(wav_path))}});
    } catch (const std::exception& ex) {
      std::lock_guard lock(mu);
      result.failures.push_back({u.id, ex.what()});
      log::error("synthesize_failed", {{"id", u.id}, {"system", system}, {"error", ex.what()}});
    }
  });
  return result;
}

CommandResult cmd_normalize(const ExperimentConfig& cfg, const DatasetManifest& manifest) {
  const Workspace ws{cfg.output_dir};
  const auto utts = manifest.in_split(Split::test);
  CommandResult result;
  std::mutex mu;
  parallel_for(utts.size(), cfg.workers, [&](std::size_t, std::size_t i) {
    const Utterance& u = *utts[i];
    try {
      const auto level = normalize_level(signal::read_wav(u.wav), cfg.target_dbov);
      if (level.clipped > 0) log::warn("clipping", {{"id", u.id}, {"samples", level.clipped}});
      const auto path = ws.wav_path("natural", u.id);
      fs::create_directories(path.parent_path());
      signal::write_wav(path, level.wave, cfg.wav_format);
      std::lock_guard lock(mu);
      ++result.processed;
      ++result.written;
      log::info("normalized", {{"id", u.id}, {"input_dbov", level.input_dbov}, {"gain_db", level.gain_db}});
    } catch (const std::exception& ex) {
      std::lock_guard lock(mu);
      result.failures.push_back({u.id, ex.what()});
      log::error("normalize_failed", {{"id", u.id}, {"error", ex.what()}});
    }
  });
  return result;
}

}  // namespace vb::pipeline
