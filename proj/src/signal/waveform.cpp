// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#include "vb/signal/waveform.hpp"

#include <cmath>

#include "vb/common/error.hpp"

namespace vb::signal {

Waveform resample_linear(const Waveform& in, int new_rate) {
  if (new_rate <= 0) throw ConfigError("resample_linear: rate must be positive");
  if (new_rate == in.sample_rate || in.samples.empty()) return {in.samples, new_rate};
  const double ratio = static_cast<double>(in.sample_rate) / new_rate;
  const auto n = static_cast<std::size_t>(std::floor((in.size() - 1) / ratio)) + 1;
  Waveform out{std::vector<double>(n), new_rate};
  for (std::size_t i = 0; i < n; ++i) {
    const double pos = i * ratio;
    const auto j = static_cast<std::size_t>(pos);
    const double frac = pos - j;
    const double a = in.samples[j];
    const double b = j + 1 < in.size() ? in.samples[j + 1] : a;
    out.samples[i] = a + frac * (b - a);
  }
  return out;
}

double rms(const Waveform& w) {
  if (w.samples.empty()) return 0.0;
  double s = 0.0;
  for (double x : w.samples) s += x * x;
  return std::sqrt(s / w.size());
}

}  // namespace vb::signal
