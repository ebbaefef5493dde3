// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#include "vb/signal/mulaw.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vb/common/error.hpp"
#include "vb/common/log.hpp"

namespace vb::signal {
namespace {

double compand(double x, double mu) {
  return std::copysign(std::log1p(mu * std::abs(x)) / std::log1p(mu), x);
}

double expand(double y, double mu) {
  return std::copysign(std::expm1(std::abs(y) * std::log1p(mu)) / mu, y);
}

}  // namespace

int mu_law_level(double x, int num_levels, double mu) {
  x = std::clamp(x, -1.0, 1.0);
  const double y = compand(x, mu);
  const int level = static_cast<int>(std::floor((y + 1.0) * 0.5 * num_levels));
  return std::clamp(level, 0, num_levels - 1);
}

double mu_law_value(int level, int num_levels, double mu) {
  if (level < 0 || level >= num_levels)
    throw InputError("mu_law_decode: level " + std::to_string(level) + " outside [0, " +
                     std::to_string(num_levels) + ")");
  const double y = (2.0 * level + 1.0) / num_levels - 1.0;
  return expand(y, mu);
}

std::pair<double, double> mu_law_bin_edges(int level, int num_levels, double mu) {
  const double lo = 2.0 * level / num_levels - 1.0;
  const double hi = 2.0 * (level + 1) / num_levels - 1.0;
  return {expand(lo, mu), expand(hi, mu)};
}

QuantizedWave mu_law_encode(const Waveform& wave, int num_levels, double mu) {
  if (num_levels < 2 || mu <= 0.0) throw ConfigError("mu_law_encode: need L >= 2 and mu > 0");
  QuantizedWave q{{}, num_levels, mu, wave.sample_rate};
  q.levels.resize(wave.size());
  std::size_t clipped = 0;
  for (std::size_t i = 0; i < wave.size(); ++i) {
    const double x = wave.samples[i];
    if (x < -1.0 || x > 1.0) ++clipped;
    q.levels[i] = mu_law_level(x, num_levels, mu);
  }
  if (clipped > 0) log::warn("mu_law_clipped", {{"samples", clipped}});
  return q;
}

Waveform mu_law_decode(const QuantizedWave& q) {
  Waveform w{std::vector<double>(q.levels.size()), q.sample_rate};
  for (std::size_t i = 0; i < q.levels.size(); ++i)
    w.samples[i] = mu_law_value(q.levels[i], q.num_levels, q.mu);
  return w;
}

Matrix one_hot(std::span<const int> classes, int num_classes) {
  Matrix m(classes.size(), static_cast<std::size_t>(num_classes));
  for (std::size_t t = 0; t < classes.size(); ++t) {
    if (classes[t] < 0 || classes[t] >= num_classes)
      throw InputError("one_hot: class " + std::to_string(classes[t]) + " out of range");
    m(t, static_cast<std::size_t>(classes[t])) = 1.0;
  }
  return m;
}

}  // namespace vb::signal
