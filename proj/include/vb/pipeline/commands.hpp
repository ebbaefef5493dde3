// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "vb/pipeline/config.hpp"
#include "vb/pipeline/manifest.hpp"

namespace vb::pipeline {

/// Output directory layout.
///   features/<id>.vbfs(.json), features/f0_codebook.json
///   models/<name>.ck(.json), models/<name>.loss.csv
///   gen/<method>/<id>.vbfs    generated acoustic features
///   wav/<method>/<id>.wav     synthesized, level-normalised
///   wav/natural/<id>.wav      level-normalised references
///   report/...
struct Workspace {
  std::filesystem::path root;

  std::filesystem::path feature_path(const std::string& id) const;
  std::filesystem::path codebook_path() const;
  std::filesystem::path model_path(const std::string& name) const;
  std::filesystem::path loss_path(const std::string& name) const;
  std::filesystem::path gen_path(const std::string& system, const std::string& id) const;
  std::filesystem::path wav_path(const std::string& system, const std::string& id) const;
  std::filesystem::path report_dir() const;
};

/// Checkpoint names used by a method: acoustic ("rnn" / "sar"), "f0", and
/// optionally "gan-rnn" / "gan-sar" and "wavenet".
std::vector<std::string> required_models(Method m);

struct Failure {
  std::string id;
  std::string error;
};

struct CommandResult {
  std::size_t processed = 0;
  std::size_t written = 0;
  std::size_t skipped = 0;
  std::vector<Failure> failures;

  /// 0 on full success, 1 when any item failed.
  int exit_code() const { return failures.empty() ? 0 : 1; }
};

/// Runs fn(worker, i) for i in [0, n) on up to `workers` threads. Items are
/// handed out in order; results must not depend on which worker runs them.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t, std::size_t)>& fn);

/// Analyses every utterance into the feature store. Files whose WAV bytes,
/// extraction settings and F0 codebook are unchanged are not rewritten.
/// Unreadable WAVs are reported per file.
CommandResult cmd_extract(const ExperimentConfig& cfg, const DatasetManifest& manifest);

/// Trains the checkpoints the method needs on the train split. A checkpoint
/// whose stamp (settings + input hashes) is unchanged is kept.
CommandResult cmd_train(const ExperimentConfig& cfg, const DatasetManifest& manifest);

/// Synthesizes `ids` (default: the test split) with the configured method.
CommandResult cmd_synthesize(const ExperimentConfig& cfg, const DatasetManifest& manifest,
                             const std::vector<std::string>& ids = {});

/// Writes level-normalised copies of the test-split references.
CommandResult cmd_normalize(const ExperimentConfig& cfg, const DatasetManifest& manifest);

/// GV, modulation spectra and IF maps for the natural references and every
/// synthesized system found in the output directory.
CommandResult cmd_report(const ExperimentConfig& cfg, const DatasetManifest& manifest);

std::string hash_hex(std::uint64_t h);
std::uint64_t hash_file(const std::filesystem::path& path);

}  // namespace vb::pipeline
