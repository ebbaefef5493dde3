// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <vector>

#include "vb/common/matrix.hpp"
#include "vb/features/extract.hpp"

namespace vb::wavenet {

/// Frame-rate conditioning repeated `factor` times per frame. Rows are kept at
/// frame rate; sample t reads frame t / factor.
struct ConditioningTrack {
  Matrix mgc;               // frames x M
  std::vector<int> qf0;     // per-frame quantised F0 level, 0 = unvoiced
  std::size_t factor = 80;  // samples per frame

  std::size_t frames() const noexcept { return qf0.size(); }
  std::size_t samples() const noexcept { return qf0.size() * factor; }
  bool voiced(std::size_t t) const { return qf0.at(t / factor) != 0; }
  std::vector<bool> voiced_flags() const;

  /// Per-sample vectors [mgc | qf0], samples() rows.
  Matrix expand() const;
  /// Frames [first, first + count).
  ConditioningTrack slice(std::size_t first, std::size_t count) const;
  void validate() const;
};

/// Frame-repeat upsampling. Throws ConfigError unless sample_rate is an exact
/// multiple of the frame rate.
ConditioningTrack upsample_conditioning(const features::AcousticFrameSequence& features, int sample_rate);

/// All frames share one MGC vector and one F0 level.
ConditioningTrack constant_conditioning(std::size_t frames, std::size_t mgc_dims, int qf0_level,
                                        std::size_t factor = 80);

}  // namespace vb::wavenet
