// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>

#include "vb/signal/waveform.hpp"

namespace vb::pipeline {

/// RMS level relative to a full-scale square wave (RMS 1), in dB. Returns
/// -infinity for silence.
double level_dbov(const signal::Waveform& wave);

struct LevelResult {
  signal::Waveform wave;
  double input_dbov = 0.0;
  double gain_db = 0.0;
  std::size_t clipped = 0;  // samples with |x| > 1 after scaling; left unclipped
};

/// Scales `wave` to `target_dbov`. Throws InputError on empty or all-zero input.
LevelResult normalize_level(const signal::Waveform& wave, double target_dbov = -26.0);

}  // namespace vb::pipeline
