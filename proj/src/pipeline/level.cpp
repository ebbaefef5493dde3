// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#include "vb/pipeline/level.hpp"

#include <cmath>
#include <limits>

#include "vb/common/error.hpp"

namespace vb::pipeline {

double level_dbov(const signal::Waveform& wave) {
  const double r = signal::rms(wave);
  return r > 0.0 ? 20.0 * std::log10(r) : -std::numeric_limits<double>::infinity();
}

LevelResult normalize_level(const signal::Waveform& wave, double target_dbov) {
  const double r = signal::rms(wave);
  if (!(r > 0.0) || !std::isfinite(r)) throw InputError("normalize: input is silent or not finite");
  LevelResult out;
  out.input_dbov = 20.0 * std::log10(r);
  const double gain = std::pow(10.0, target_dbov / 20.0) / r;
  out.gain_db = 20.0 * std::log10(gain);
  out.wave.sample_rate = wave.sample_rate;
  out.wave.samples.resize(wave.size());
  for (std::size_t i = 0; i < wave.size(); ++i) {
    out.wave.samples[i] = wave.samples[i] * gain;
    if (std::abs(out.wave.samples[i]) > 1.0) ++out.clipped;
  }
  return out;
}

}  // namespace vb::pipeline
