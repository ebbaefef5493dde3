// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#include "vb/vocoder/griffin_lim.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "vb/common/error.hpp"
#include "vb/common/rng.hpp"
#include "vb/features/cepstrum.hpp"

namespace vb::vocoder {
namespace {

signal::ComplexSpectrum with_phase(const Matrix& amp, const signal::ComplexSpectrum& phase_src) {
  signal::ComplexSpectrum out(amp.rows(), amp.cols());
  for (std::size_t n = 0; n < amp.rows(); ++n)
    for (std::size_t f = 0; f < amp.cols(); ++f) {
      const auto z = phase_src.at(n, f);
      const double m = std::abs(z);
      out.at(n, f) = m > 0.0 ? amp(n, f) * (z / m) : signal::cplx(amp(n, f), 0.0);
    }
  return out;
}

signal::ComplexSpectrum initial_spectrum(const Matrix& amp, const GriffinLimConfig& glc,
                                         const signal::ComplexSpectrum* init) {
  switch (glc.init_phase) {
    case InitPhase::zero: {
      signal::ComplexSpectrum s(amp.rows(), amp.cols());
      for (std::size_t i = 0; i < s.data.size(); ++i) s.data[i] = amp.values()[i];
      return s;
    }
    case InitPhase::random: {
      Rng rng(derive_seed(glc.seed, "griffin_lim.phase"));
      std::uniform_real_distribution<double> u(-std::numbers::pi, std::numbers::pi);
      signal::ComplexSpectrum s(amp.rows(), amp.cols());
      for (std::size_t i = 0; i < s.data.size(); ++i) s.data[i] = std::polar(amp.values()[i], u(rng));
      return s;
    }
    case InitPhase::minimum: return features::minimum_phase_spectrum(amp);
    case InitPhase::input:
      if (init == nullptr) throw ConfigError("griffin_lim: input phase requested without an initial spectrum");
      if (init->frames != amp.rows() || init->bins != amp.cols())
        throw ShapeError("griffin_lim", "initial spectrum shape differs from the target");
      return with_phase(amp, *init);
  }
  throw ConfigError("griffin_lim: unknown init phase");
}

}  // namespace

InitPhase parse_init_phase(const std::string& s) {
  if (s == "zero") return InitPhase::zero;
  if (s == "random") return InitPhase::random;
  if (s == "minimum") return InitPhase::minimum;
  if (s == "input") return InitPhase::input;
  throw ConfigError("unknown init phase '" + s + "'");
}

std::string to_string(InitPhase p) {
  switch (p) {
    case InitPhase::zero: return "zero";
    case InitPhase::random: return "random";
    case InitPhase::minimum: return "minimum";
    case InitPhase::input: return "input";
  }
  return "?";
}

void GriffinLimConfig::validate() const {
  stft.validate();
  if (!signal::is_cola(stft))
    throw ConfigError("griffin_lim: frame config (frame " + std::to_string(stft.frame_length) + ", hop " +
                      std::to_string(stft.hop) + ") is not constant-overlap-add");
  if (tolerance < 0) throw ConfigError("griffin_lim: tolerance must be non-negative");
  if (sample_rate <= 0) throw ConfigError("griffin_lim: sample rate must be positive");
}

nlohmann::json GriffinLimConfig::to_json() const {
  return {{"iterations", iterations},
          {"frame_length", stft.frame_length},
          {"hop", stft.hop},
          {"window", signal::to_string(stft.window)},
          {"init_phase", to_string(init_phase)},
          {"tolerance", tolerance},
          {"seed", seed},
          {"sample_rate", sample_rate}};
}

GriffinLimConfig GriffinLimConfig::from_json(const nlohmann::json& j) {
  GriffinLimConfig c;
  c.iterations = j.value("iterations", c.iterations);
  c.stft.frame_length = j.value("frame_length", c.stft.frame_length);
  c.stft.hop = j.value("hop", c.stft.hop);
  c.stft.window = signal::parse_window(j.value("window", signal::to_string(c.stft.window)));
  c.init_phase = parse_init_phase(j.value("init_phase", to_string(c.init_phase)));
  c.tolerance = j.value("tolerance", c.tolerance);
  c.seed = j.value("seed", c.seed);
  c.sample_rate = j.value("sample_rate", c.sample_rate);
  c.validate();
  return c;
}

double spectral_convergence(const Matrix& mag, const Matrix& target) {
  if (mag.rows() != target.rows() || mag.cols() != target.cols())
    throw ShapeError("spectral_convergence", "magnitude and target shapes differ");
  const std::size_t F = target.cols();
  double num = 0.0, den = 0.0;
  for (std::size_t n = 0; n < target.rows(); ++n)
    for (std::size_t f = 0; f < F; ++f) {
      const double w = (f == 0 || f + 1 == F) ? 1.0 : 2.0;
      const double d = mag(n, f) - target(n, f);
      num += w * d * d;
      den += w * target(n, f) * target(n, f);
    }
  return den > 0.0 ? std::sqrt(num / den) : 0.0;
}

GriffinLimResult griffin_lim(const Matrix& target, const GriffinLimConfig& glc, const signal::ComplexSpectrum* init) {
  glc.validate();
  if (target.cols() != glc.stft.frame_length / 2 + 1)
    throw ShapeError("griffin_lim", "target has " + std::to_string(target.cols()) + " bins, frame config needs " +
                                        std::to_string(glc.stft.frame_length / 2 + 1));
  for (double a : target.values())
    if (!(a >= 0.0) || !std::isfinite(a)) throw InputError("griffin_lim: target amplitudes must be finite and >= 0");

  GriffinLimResult r;
  r.wave = signal::istft(initial_spectrum(target, glc, init), glc.stft, glc.sample_rate);
  auto spec = signal::stft(r.wave, glc.stft);
  r.errors.push_back(spectral_convergence(signal::magnitude(spec), target));
  for (std::size_t i = 0; i < glc.iterations && r.errors.back() > glc.tolerance; ++i) {
    r.wave = signal::istft(with_phase(target, spec), glc.stft, glc.sample_rate);
    spec = signal::stft(r.wave, glc.stft);
    r.errors.push_back(spectral_convergence(signal::magnitude(spec), target));
  }
  return r;
}

GriffinLimResult phase_recovery_enhance(const signal::Waveform& wave, const GriffinLimConfig& glc) {
  glc.validate();
  const auto& fc = glc.stft;
  // Pad so that every input sample sees the full window overlap.
  const std::size_t front = fc.frame_length - fc.hop;
  std::size_t len = front + wave.size() + front;
  if ((len - fc.frame_length) % fc.hop != 0) len += fc.hop - (len - fc.frame_length) % fc.hop;
  signal::Waveform padded{std::vector<double>(len, 0.0), wave.sample_rate};
  std::copy(wave.samples.begin(), wave.samples.end(), padded.samples.begin() + static_cast<long>(front));
  const auto spec = signal::stft(padded, fc);
  GriffinLimConfig g = glc;
  g.sample_rate = wave.sample_rate;
  auto r = griffin_lim(signal::magnitude(spec), g, &spec);
  r.wave.samples.erase(r.wave.samples.begin(), r.wave.samples.begin() + static_cast<long>(front));
  r.wave.samples.resize(wave.size());
  return r;
}

}  // namespace vb::vocoder
