// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

namespace vb::signal {

/// Mono sample sequence. Samples are nominally in [-1, 1].
struct Waveform {
  std::vector<double> samples;
  int sample_rate = 16000;

  std::size_t size() const noexcept { return samples.size(); }
  double duration() const { return static_cast<double>(samples.size()) / sample_rate; }
};

/// Linear-interpolation resampler.
Waveform resample_linear(const Waveform& in, int new_rate);

/// Root-mean-square of the samples (0 for an empty waveform).
double rms(const Waveform& w);

}  // namespace vb::signal
