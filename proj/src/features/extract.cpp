// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#include "vb/features/extract.hpp"

#include <cmath>
#include <string>

#include "vb/common/error.hpp"
#include "vb/signal/fft.hpp"

namespace vb::features {

signal::FrameConfig ExtractionConfig::frames_for(int sample_rate) const {
  const double hop = sample_rate / frame_rate;
  if (std::abs(hop - std::round(hop)) > 1e-9 || hop < 1.0)
    throw ConfigError("frame rate " + std::to_string(frame_rate) + " Hz does not give an integer hop at " +
                      std::to_string(sample_rate) + " Hz");
  std::size_t len = frame_length;
  if (len == 0) len = signal::next_power_of_two(static_cast<std::size_t>(std::ceil(0.04 * sample_rate)));
  signal::FrameConfig fc{len, static_cast<std::size_t>(std::lround(hop)), signal::WindowType::hann};
  fc.validate();
  return fc;
}

nlohmann::json ExtractionConfig::to_json() const {
  return {{"frame_rate", frame_rate},
          {"frame_length", frame_length},
          {"mgc_order", mgc_order},
          {"mgc_alpha", mgc_alpha},
          {"bap_bands", bap_bands},
          {"f0_min", f0.f_min},
          {"f0_max", f0.f_max},
          {"voicing_threshold", f0.voicing_threshold},
          {"silence_rms", f0.silence_rms},
          {"unvoiced_smoothing_hz", unvoiced_smoothing_hz}};
}

ExtractionConfig ExtractionConfig::from_json(const nlohmann::json& j) {
  ExtractionConfig c;
  c.frame_rate = j.value("frame_rate", c.frame_rate);
  c.frame_length = j.value("frame_length", c.frame_length);
  c.mgc_order = j.value("mgc_order", c.mgc_order);
  c.mgc_alpha = j.value("mgc_alpha", c.mgc_alpha);
  c.bap_bands = j.value("bap_bands", c.bap_bands);
  c.f0.f_min = j.value("f0_min", c.f0.f_min);
  c.f0.f_max = j.value("f0_max", c.f0.f_max);
  c.f0.voicing_threshold = j.value("voicing_threshold", c.f0.voicing_threshold);
  c.f0.silence_rms = j.value("silence_rms", c.f0.silence_rms);
  c.unvoiced_smoothing_hz = j.value("unvoiced_smoothing_hz", c.unvoiced_smoothing_hz);
  return c;
}

void AcousticFrameSequence::validate() const {
  const std::size_t n = frames();
  if (bap.frames() != n || f0.size() != n || (!qf0.levels.empty() && qf0.levels.size() != n))
    throw ShapeError("AcousticFrameSequence", "streams disagree on frame count (mgc " + std::to_string(n) +
                                                  ", bap " + std::to_string(bap.frames()) + ", f0 " +
                                                  std::to_string(f0.size()) + ")");
}

signal::PowerSpectrum analysis_power_spectrum(const signal::Waveform& wave, const signal::FrameConfig& frames) {
  auto p = signal::power_spectrum(signal::stft(wave, frames));
  double wsum = 0.0;
  for (double w : signal::make_window(frames.window, frames.frame_length)) wsum += w * w;
  for (double& v : p.values.values()) v /= wsum;
  return p;
}

AcousticFrameSequence analyze(const signal::Waveform& wave, const ExtractionConfig& cfg) {
  const auto frames = cfg.frames_for(wave.sample_rate);
  AcousticFrameSequence seq;
  seq.f0 = extract_f0(wave, frames, cfg.f0);
  const auto power = analysis_power_spectrum(wave, frames);
  std::vector<double> widths(power.frames());
  const double bins_per_hz = static_cast<double>(frames.frame_length) / wave.sample_rate;
  for (std::size_t n = 0; n < widths.size(); ++n) {
    const double hz = seq.f0.f0[n] > 0.0 ? seq.f0.f0[n] : cfg.unvoiced_smoothing_hz;
    widths[n] = hz * bins_per_hz;
  }
  seq.mgc = cepstral_analysis(smooth_power_spectrum(power, widths), cfg.mgc_order, cfg.mgc_alpha);
  seq.bap = estimate_band_aperiodicity(wave, seq.f0, frames, cfg.bap_bands);
  seq.validate();
  return seq;
}

void attach_quantized_f0(AcousticFrameSequence& seq, const F0Codebook& codebook) {
  seq.qf0 = quantize_f0(seq.f0, codebook);
}

}  // namespace vb::features
