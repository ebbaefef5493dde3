// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "vb/common/matrix.hpp"
#include "vb/signal/stft.hpp"
#include "vb/signal/waveform.hpp"

namespace vb::vocoder {

/// `input` starts from the phase of a given spectrum (phase_recovery_enhance
/// of an existing waveform).
enum class InitPhase { zero, random, minimum, input };

InitPhase parse_init_phase(const std::string& s);
std::string to_string(InitPhase p);

struct GriffinLimConfig {
  std::size_t iterations = 60;
  signal::FrameConfig stft{1024, 512, signal::WindowType::hann};
  InitPhase init_phase = InitPhase::zero;
  double tolerance = 0.0;  // stop once E falls below this
  std::uint64_t seed = 0;  // for InitPhase::random
  int sample_rate = 16000;

  void validate() const;
  nlohmann::json to_json() const;
  static GriffinLimConfig from_json(const nlohmann::json& j);
};

struct GriffinLimResult {
  signal::Waveform wave;
  /// E_i for x_0 (the initial reconstruction) through the returned signal.
  std::vector<double> errors;
};

/// Spectral convergence || |STFT(x)| - A || / ||A|| over the two-sided
/// spectrum (interior bins counted twice); 0 when A is all zero.
double spectral_convergence(const Matrix& stft_magnitude, const Matrix& target);

/// x_0 = istft(A e^{i phi_0}); x_{i+1} = istft(A e^{i angle(stft(x_i))}).
/// `init` supplies phi_0 for InitPhase::input. Throws ConfigError for a
/// non-COLA frame config or a missing initial spectrum.
GriffinLimResult griffin_lim(const Matrix& target_amplitude, const GriffinLimConfig& glc,
                             const signal::ComplexSpectrum* init = nullptr);

/// A = |stft(wave)|, then griffin_lim(A). With InitPhase::input the start is
/// the wave's own phase, which is a fixed point. Output has the input length.
GriffinLimResult phase_recovery_enhance(const signal::Waveform& wave, const GriffinLimConfig& glc);

}  // namespace vb::vocoder
