// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "json.hpp"
#include "vb/features/aperiodicity.hpp"
#include "vb/features/cepstrum.hpp"
#include "vb/features/f0.hpp"
#include "vb/signal/stft.hpp"
#include "vb/signal/waveform.hpp"

namespace vb::vocoder {

/// Frame n of the features is centred at n * hop + frame_length / 2, as in
/// analysis. Synthesis runs on Hann frames of a whole number of hops (so the
/// overlap-add is exact) with the same centres.
struct SynthesisConfig {
  int sample_rate = 16000;
  double frame_rate = 200.0;
  std::size_t frame_length = 0;  // analysis frame; 0: smallest power of two >= 40 ms
  std::uint64_t noise_seed = 0;

  std::size_t hop() const;
  std::size_t analysis_length() const;
  /// Synthesis STFT: the smallest multiple of the hop >= analysis_length().
  signal::FrameConfig frames() const;
  std::size_t bins() const { return frames().frame_length / 2 + 1; }
  /// Start of synthesis frame 0 relative to analysis frame 0.
  long offset() const;
  /// Output samples for n frames, (n - 1) * hop + analysis_length().
  std::size_t length_for(std::size_t n) const;
  void validate() const;
  nlohmann::json to_json() const;
  static SynthesisConfig from_json(const nlohmann::json& j);
};

/// Band-limited pulses of amplitude sqrt(sr / f0), one per period of a phase
/// accumulator driven by the F0 of the nearest synthesis frame centre. Pulses sit at
/// fractional positions, so the long-term power is flat at 1 like unit white
/// noise. Unvoiced frames emit nothing and hold the phase.
signal::Waveform pulse_train(const features::F0Track& f0, std::size_t length, const SynthesisConfig& cfg);

/// Unit-variance Gaussian noise from cfg.noise_seed.
signal::Waveform excitation_noise(std::size_t length, const SynthesisConfig& cfg);

/// Per-frame blend sqrt(1 - bap_b) * pulse + sqrt(bap_b) * noise on the
/// synthesis STFT frames, bands as in band_of_bins. Unvoiced frames are pure noise.
signal::ComplexSpectrum excitation_spectrum(const features::F0Track& f0, const features::BandAperiodicity& bap,
                                            const SynthesisConfig& cfg);

signal::Waveform mixed_excitation(const features::F0Track& f0, const features::BandAperiodicity& bap,
                                  const SynthesisConfig& cfg);

/// Excitation spectrum times the minimum-phase spectrum of the cepstral
/// envelope, then overlap-add. Output length is length_for(frames).
signal::Waveform source_filter_synthesize(const features::Cepstra& mgc, const features::F0Track& f0,
                                          const features::BandAperiodicity& bap, const SynthesisConfig& cfg);

}  // namespace vb::vocoder
