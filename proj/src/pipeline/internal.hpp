// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "vb/acoustic/f0_model.hpp"
#include "vb/acoustic/gan.hpp"
#include "vb/acoustic/training.hpp"
#include "vb/features/extract.hpp"
#include "vb/pipeline/commands.hpp"
#include "vb/wavenet/wavenet.hpp"

namespace vb::pipeline::detail {

/// Reference features and linguistic features of one utterance, cut to a
/// common frame count.
struct UtteranceData {
  std::string id;
  features::AcousticFrameSequence features;
  Matrix linguistic;
  int sample_rate = 16000;
};

/// Throws InputError naming the utterance when its features are missing.
UtteranceData load_utterance(const Workspace& ws, const Utterance& u);

/// [mgc | bap], N x (M + B).
Matrix acoustic_matrix(const features::AcousticFrameSequence& f);

features::F0Codebook load_codebook(const Workspace& ws);

/// First sample of frame 0's hop-wide slot around the frame centre, at the
/// Wavenet rate: (frame_length - hop) / 2.
std::size_t wavenet_offset(const ExperimentConfig& cfg);

void save_f0_model(const std::filesystem::path& path, acoustic::F0Model& m);
acoustic::F0Model load_f0_model(const std::filesystem::path& path);
void save_gan(const std::filesystem::path& path, acoustic::GanPostfilter& g);
acoustic::GanPostfilter load_gan(const std::filesystem::path& path);

std::string acoustic_name(acoustic::AcousticKind k);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace vb::pipeline::detail
