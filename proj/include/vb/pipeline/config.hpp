// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "vb/acoustic/f0_model.hpp"
#include "vb/acoustic/gan.hpp"
#include "vb/acoustic/training.hpp"
#include "vb/features/extract.hpp"
#include "vb/signal/wav_io.hpp"
#include "vb/vocoder/griffin_lim.hpp"
#include "vb/wavenet/wavenet.hpp"

namespace vb::pipeline {

/// The six supported systems: acoustic model (RNN, SAR, optionally with the
/// GAN postfilter) followed by a waveform path.
enum class Method { rnn_wo, rga_wo, sar_wo, sga_wo, sar_pr, sar_wa };

enum class WavePath { source_filter, phase_recovery, wavenet };

/// Accepts the system ids "RNN-Wo", "RGA-Wo", "SAR-Wo", "SGA-Wo", "SAR-Pr"
/// and "SAR-Wa". Throws ConfigError otherwise (SAR-Pm gets its own message).
Method parse_method(std::string_view id);
std::string to_string(Method m);
const std::vector<Method>& all_methods();

acoustic::AcousticKind acoustic_kind(Method m);
bool uses_gan(Method m);
WavePath wave_path(Method m);

struct F0TrainConfig {
  std::size_t steps = 300;
  std::uint64_t seed = 1;
  acoustic::F0ModelConfig model;
};

struct GanTrainConfig {
  std::size_t steps = 200;
  std::uint64_t seed = 1;
  acoustic::GanConfig model;
};

struct ReportConfig {
  std::vector<std::size_t> ms_dims{11};
  std::size_t ms_fft_size = 0;  // 0: next power of two >= the longest utterance
  std::size_t if_utterances = 1;
  signal::FrameConfig if_frames{1024, 256, signal::WindowType::hann};
  double if_rel_db = -40.0;
};

struct ExperimentConfig {
  Method method = Method::sar_wo;
  std::filesystem::path manifest = "manifest.json";
  std::filesystem::path output_dir = "out";
  std::size_t workers = 1;

  features::ExtractionConfig extraction;
  acoustic::AcousticTrainConfig acoustic;  // kind follows the method
  F0TrainConfig f0;
  GanTrainConfig gan;
  wavenet::WavenetConfig wavenet;
  wavenet::WavenetTrainConfig wavenet_train;
  vocoder::GriffinLimConfig griffin_lim;  // sample_rate follows the waveform
  std::uint64_t synthesis_seed = 1;
  double target_dbov = -26.0;
  signal::WavFormat wav_format = signal::WavFormat::pcm16;
  ReportConfig report;

  /// Throws ConfigError on inconsistent dimensions or rates.
  void validate() const;
  /// Every setting that affects outputs. `workers` is left out.
  nlohmann::json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& j);

  /// Sets every seed to derive_seed(seed, <section>).
  void reseed(std::uint64_t seed);
};

/// TOML-style text: `key = value` lines, `[section]` / `[a.b]` headers,
/// dotted keys, `#` comments. Values are quoted strings, booleans, numbers
/// or flat arrays of those.
nlohmann::json parse_config_text(std::string_view text);
std::string format_config_text(const nlohmann::json& j);

struct ConfigAudit {
  std::vector<std::string> hidden;   // effective keys the file leaves to defaults
  std::vector<std::string> unknown;  // file keys that nothing reads
};

/// Diffs the flattened key sets of a config file and the effective config.
ConfigAudit audit_config(const nlohmann::json& file, const nlohmann::json& effective);

struct LoadedConfig {
  ExperimentConfig config;
  nlohmann::json file;
  ConfigAudit audit;
};

/// Reads JSON (first non-space byte '{') or the text format. Relative
/// manifest/output paths resolve against the config file's directory.
/// Unknown keys are a ConfigError.
LoadedConfig load_config(const std::filesystem::path& path);
void save_config(const std::filesystem::path& path, const ExperimentConfig& cfg);

}  // namespace vb::pipeline
