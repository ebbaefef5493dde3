// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "vb/common/matrix.hpp"
#include "vb/features/extract.hpp"
#include "vb/pipeline/config.hpp"
#include "vb/pipeline/manifest.hpp"
#include "vb/signal/waveform.hpp"

// Synthetic speech-like corpus for desk-scale runs: phone sequences drawn
// from a small inventory, rendered by a two-formant source-filter model with
// a declining F0 contour, plus frame-level linguistic features.

namespace vb::pipeline {

struct PhoneSegment {
  std::size_t phone = 0;
  std::size_t start = 0;   // samples
  std::size_t length = 0;  // samples
};

struct ToyCorpusConfig {
  std::size_t utterances = 10;
  std::size_t validation = 1;
  std::size_t test = 2;
  double min_seconds = 0.8;
  double max_seconds = 1.2;
  int sample_rate = 16000;
  std::uint64_t seed = 1;
};

/// Size of the phone inventory (five vowels, a nasal, a fricative, silence).
std::size_t toy_phone_count();
bool toy_phone_voiced(std::size_t phone);

/// Per frame: one-hot phone (toy_phone_count() columns), position in the
/// phone, position in the utterance, phone duration in seconds. Frame n
/// describes the analysis frame centre n * hop + frame_length / 2.
Matrix synthetic_linguistic(const std::vector<PhoneSegment>& phones, std::size_t total_samples,
                            const signal::FrameConfig& frames);
std::size_t synthetic_linguistic_dim();

struct ToyUtterance {
  std::vector<PhoneSegment> phones;
  signal::Waveform wave;
};

ToyUtterance make_toy_utterance(const ToyCorpusConfig& cfg, std::uint64_t seed);

/// Writes wav/<id>.wav, ling/<id>.vblf and manifest.json under `dir`. The
/// last `test` utterances are the test split, the `validation` before them
/// the validation split.
DatasetManifest write_toy_corpus(const std::filesystem::path& dir, const ToyCorpusConfig& cfg,
                                 const features::ExtractionConfig& extraction);

/// Desk-scale model sizes and step counts for the toy corpus.
ExperimentConfig toy_experiment_config();

}  // namespace vb::pipeline
