// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "vb/signal/stft.hpp"
#include "vb/signal/waveform.hpp"

namespace vb::features {

/// Per-frame F0 in Hz; 0 marks an unvoiced frame.
struct F0Track {
  std::vector<double> f0;
  double frame_rate = 200.0;

  std::size_t size() const { return f0.size(); }
};

struct F0Config {
  double f_min = 55.0;
  double f_max = 600.0;
  double voicing_threshold = 0.3;  // normalised autocorrelation peak
  double silence_rms = 1e-3;       // frames quieter than this are unvoiced
};

/// Normalised-autocorrelation pitch tracker over the frames of `frames`
/// (frame n starts at n * hop). Requires sample_rate >= 4 * f_max.
F0Track extract_f0(const signal::Waveform& wave, const signal::FrameConfig& frames, const F0Config& cfg = {});

/// Per-frame level: 0 = unvoiced, 1..255 = log-spaced voiced levels.
struct QuantizedF0 {
  std::vector<int> levels;
};

/// 255 voiced levels spaced uniformly in log F0 between two bounds.
struct F0Codebook {
  static constexpr int kVoicedLevels = 255;
  static constexpr int kClasses = kVoicedLevels + 1;

  double log_min = 0.0;
  double log_max = 0.0;

  double step() const { return (log_max - log_min) / (kVoicedLevels - 1); }
  double center(int level) const;
  int level(double f0) const;

  /// Bounds at the 1st and 99th percentile of the voiced values. Throws
  /// InputError when no frame is voiced.
  static F0Codebook from_voiced(std::span<const double> f0_values);
  static F0Codebook from_tracks(std::span<const F0Track> tracks);
};

QuantizedF0 quantize_f0(const F0Track& track, const F0Codebook& codebook);
F0Track dequantize_f0(const QuantizedF0& q, const F0Codebook& codebook, double frame_rate = 200.0);

}  // namespace vb::features
