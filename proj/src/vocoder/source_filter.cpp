// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#include "vb/vocoder/source_filter.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "vb/common/error.hpp"
#include "vb/common/rng.hpp"
#include "vb/signal/fft.hpp"

namespace vb::vocoder {
namespace {

constexpr int kPulseHalfWidth = 8;

double windowed_sinc(double x) {
  if (std::abs(x) >= kPulseHalfWidth) return 0.0;
  const double w = 0.5 + 0.5 * std::cos(std::numbers::pi * x / kPulseHalfWidth);
  if (x == 0.0) return w;
  return w * std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
}

// Taps are scaled to unit energy so every pulse carries amp^2.
void add_pulse(std::vector<double>& out, double at, double amp) {
  const long lo = static_cast<long>(std::floor(at)) - kPulseHalfWidth + 1;
  double taps[2 * kPulseHalfWidth];
  double energy = 0.0;
  for (int i = 0; i < 2 * kPulseHalfWidth; ++i) {
    taps[i] = windowed_sinc(static_cast<double>(lo + i) - at);
    energy += taps[i] * taps[i];
  }
  const double g = amp / std::sqrt(energy);
  for (int i = 0; i < 2 * kPulseHalfWidth; ++i) {
    const long k = lo + i;
    if (k >= 0 && k < static_cast<long>(out.size())) out[static_cast<std::size_t>(k)] += g * taps[i];
  }
}

void check_aligned(const features::F0Track& f0, const features::BandAperiodicity& bap) {
  if (f0.size() != bap.frames())
    throw ShapeError("vocoder", std::to_string(f0.size()) + " F0 frames vs " + std::to_string(bap.frames()) +
                                    " BAP frames");
}

// Synthesis-frame time axis -> analysis time axis.
signal::Waveform to_analysis_time(const signal::Waveform& u, const SynthesisConfig& cfg, std::size_t frames) {
  const long off = cfg.offset();
  signal::Waveform x{std::vector<double>(cfg.length_for(frames), 0.0), cfg.sample_rate};
  for (std::size_t t = 0; t < x.size(); ++t) {
    const long k = static_cast<long>(t) - off;
    if (k >= 0 && k < static_cast<long>(u.size())) x.samples[t] = u.samples[static_cast<std::size_t>(k)];
  }
  return x;
}

std::size_t synthesis_length(const SynthesisConfig& cfg, std::size_t frames) {
  const auto fc = cfg.frames();
  return frames == 0 ? 0 : (frames - 1) * fc.hop + fc.frame_length;
}

}  // namespace

std::size_t SynthesisConfig::hop() const {
  if (sample_rate <= 0 || !(frame_rate > 0)) throw ConfigError("synthesis: rates must be positive");
  const double hop = sample_rate / frame_rate;
  if (std::abs(hop - std::round(hop)) > 1e-9 || hop < 1.0)
    throw ConfigError("synthesis: frame rate " + std::to_string(frame_rate) + " Hz does not give an integer hop at " +
                      std::to_string(sample_rate) + " Hz");
  return static_cast<std::size_t>(std::lround(hop));
}

std::size_t SynthesisConfig::analysis_length() const {
  if (frame_length > 0) return frame_length;
  return signal::next_power_of_two(static_cast<std::size_t>(std::ceil(0.04 * sample_rate)));
}

signal::FrameConfig SynthesisConfig::frames() const {
  const std::size_t h = hop();
  signal::FrameConfig fc{(analysis_length() + h - 1) / h * h, h, signal::WindowType::hann};
  if (fc.frame_length < 2 * h) fc.frame_length = 2 * h;
  fc.validate();
  return fc;
}

long SynthesisConfig::offset() const {
  return (static_cast<long>(analysis_length()) - static_cast<long>(frames().frame_length)) / 2;
}

std::size_t SynthesisConfig::length_for(std::size_t n) const { return n == 0 ? 0 : (n - 1) * hop() + analysis_length(); }

void SynthesisConfig::validate() const {
  const auto fc = frames();
  if (!signal::is_cola(fc)) throw ConfigError("synthesis: frame config is not constant-overlap-add");
}

nlohmann::json SynthesisConfig::to_json() const {
  return {{"sample_rate", sample_rate},
          {"frame_rate", frame_rate},
          {"frame_length", frame_length},
          {"noise_seed", noise_seed}};
}

SynthesisConfig SynthesisConfig::from_json(const nlohmann::json& j) {
  SynthesisConfig c;
  c.sample_rate = j.value("sample_rate", c.sample_rate);
  c.frame_rate = j.value("frame_rate", c.frame_rate);
  c.frame_length = j.value("frame_length", c.frame_length);
  c.noise_seed = j.value("noise_seed", c.noise_seed);
  c.validate();
  return c;
}

signal::Waveform pulse_train(const features::F0Track& f0, std::size_t length, const SynthesisConfig& cfg) {
  const auto fc = cfg.frames();
  const double sr = cfg.sample_rate;
  signal::Waveform out{std::vector<double>(length, 0.0), cfg.sample_rate};
  if (f0.size() == 0) return out;
  const double centre = 0.5 * static_cast<double>(fc.frame_length);
  const auto frame_at = [&](std::size_t t) {
    const double n = std::round((static_cast<double>(t) - centre) / static_cast<double>(fc.hop));
    return static_cast<std::size_t>(std::clamp(n, 0.0, static_cast<double>(f0.size() - 1)));
  };
  double phase = 0.0;
  for (std::size_t t = 0; t < length; ++t) {
    const double f = f0.f0[frame_at(t)];
    if (!(f > 0.0)) continue;
    const double step = f / sr;
    const double next = phase + step;
    if (next >= 1.0) {
      const double at = static_cast<double>(t) + (1.0 - phase) / step;
      add_pulse(out.samples, at, std::sqrt(sr / f));
      phase = next - 1.0;
    } else {
      phase = next;
    }
  }
  return out;
}

signal::Waveform excitation_noise(std::size_t length, const SynthesisConfig& cfg) {
  Rng rng(derive_seed(cfg.noise_seed, "vocoder.noise"));
  std::normal_distribution<double> g(0.0, 1.0);
  signal::Waveform out{std::vector<double>(length), cfg.sample_rate};
  for (double& v : out.samples) v = g(rng);
  return out;
}

signal::ComplexSpectrum excitation_spectrum(const features::F0Track& f0, const features::BandAperiodicity& bap,
                                            const SynthesisConfig& cfg) {
  check_aligned(f0, bap);
  const auto fc = cfg.frames();
  const std::size_t N = f0.size(), len = synthesis_length(cfg, N);
  const auto pulses = signal::stft(pulse_train(f0, len, cfg), fc);
  auto out = signal::stft(excitation_noise(len, cfg), fc);
  const std::size_t F = out.bins;
  const auto band = features::band_of_bins(F, bap.bands());
  for (std::size_t n = 0; n < N; ++n) {
    if (!(f0.f0[n] > 0.0)) continue;
    for (std::size_t f = 0; f < F; ++f) {
      const double a = std::clamp(bap.values(n, band[f]), 0.0, 1.0);
      out.at(n, f) = std::sqrt(1.0 - a) * pulses.at(n, f) + std::sqrt(a) * out.at(n, f);
    }
  }
  return out;
}

signal::Waveform mixed_excitation(const features::F0Track& f0, const features::BandAperiodicity& bap,
                                  const SynthesisConfig& cfg) {
  return to_analysis_time(signal::istft(excitation_spectrum(f0, bap, cfg), cfg.frames(), cfg.sample_rate), cfg,
                          f0.size());
}

signal::Waveform source_filter_synthesize(const features::Cepstra& mgc, const features::F0Track& f0,
                                          const features::BandAperiodicity& bap, const SynthesisConfig& cfg) {
  if (mgc.frames() != f0.size())
    throw ShapeError("vocoder", std::to_string(mgc.frames()) + " MGC frames vs " + std::to_string(f0.size()) +
                                    " F0 frames");
  auto spec = excitation_spectrum(f0, bap, cfg);
  const auto filt = features::minimum_phase_spectrum(features::cepstra_to_amplitude(mgc, spec.bins));
  for (std::size_t i = 0; i < spec.data.size(); ++i) spec.data[i] *= filt.data[i];
  return to_analysis_time(signal::istft(spec, cfg.frames(), cfg.sample_rate), cfg, f0.size());
}

}  // namespace vb::vocoder
