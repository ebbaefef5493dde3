// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "json.hpp"
#include "vb/features/aperiodicity.hpp"
#include "vb/features/cepstrum.hpp"
#include "vb/features/f0.hpp"
#include "vb/signal/stft.hpp"
#include "vb/signal/waveform.hpp"

namespace vb::features {

struct ExtractionConfig {
  double frame_rate = 200.0;
  std::size_t frame_length = 0;  // 0: smallest power of two >= 40 ms
  std::size_t mgc_order = 60;
  double mgc_alpha = 0.55;
  std::size_t bap_bands = 25;
  F0Config f0;
  double unvoiced_smoothing_hz = 200.0;

  /// Analysis frames at `sample_rate`; the hop must be a whole number of samples.
  signal::FrameConfig frames_for(int sample_rate) const;

  nlohmann::json to_json() const;
  static ExtractionConfig from_json(const nlohmann::json& j);
};

/// MGC + BAP + F0 (+ quantised F0) for N frames.
struct AcousticFrameSequence {
  Cepstra mgc;
  BandAperiodicity bap;
  F0Track f0;
  QuantizedF0 qf0;

  std::size_t frames() const { return mgc.frames(); }
  /// Throws ShapeError unless every stream has the same frame count.
  void validate() const;
};

/// Windowed power spectrum scaled by 1 / sum(w^2), so white noise of
/// variance s^2 has flat expected power s^2.
signal::PowerSpectrum analysis_power_spectrum(const signal::Waveform& wave, const signal::FrameConfig& frames);

/// Full analysis chain. `qf0` is left empty; fill it once a codebook exists.
AcousticFrameSequence analyze(const signal::Waveform& wave, const ExtractionConfig& cfg);

void attach_quantized_f0(AcousticFrameSequence& seq, const F0Codebook& codebook);

}  // namespace vb::features
