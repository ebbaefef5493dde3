// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#include "vb/features/f0.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vb/common/error.hpp"
#include "vb/signal/fft.hpp"

namespace vb::features {

F0Track extract_f0(const signal::Waveform& wave, const signal::FrameConfig& frames, const F0Config& cfg) {
  frames.validate();
  const double sr = wave.sample_rate;
  if (sr < 4.0 * cfg.f_max)
    throw ConfigError("extract_f0: sample rate " + std::to_string(wave.sample_rate) + " below 4 * f_max");
  if (!(cfg.f_min > 0.0 && cfg.f_min < cfg.f_max)) throw ConfigError("extract_f0: need 0 < f_min < f_max");

  const std::size_t W = frames.frame_length;
  const auto lag_min = static_cast<std::size_t>(std::floor(sr / cfg.f_max));
  const auto lag_max = static_cast<std::size_t>(std::ceil(sr / cfg.f_min));
  if (lag_max + 2 >= W) throw ConfigError("extract_f0: frame too short for f_min");

  const std::size_t n_frames = signal::frame_count(wave.size(), frames);
  F0Track track{std::vector<double>(n_frames, 0.0), sr / static_cast<double>(frames.hop)};
  const std::size_t nfft = signal::next_power_of_two(2 * W);
  const auto& plan = signal::fft_plan(nfft);
  std::vector<signal::cplx> buf(nfft);
  std::vector<double> energy_prefix(W + 1), r(lag_max + 2);

  for (std::size_t n = 0; n < n_frames; ++n) {
    const double* x = wave.samples.data() + n * frames.hop;
    energy_prefix[0] = 0.0;
    for (std::size_t t = 0; t < W; ++t) energy_prefix[t + 1] = energy_prefix[t] + x[t] * x[t];
    if (std::sqrt(energy_prefix[W] / W) < cfg.silence_rms) continue;

    std::fill(buf.begin(), buf.end(), signal::cplx{});
    for (std::size_t t = 0; t < W; ++t) buf[t] = x[t];
    plan.forward(buf);
    for (auto& v : buf) v = std::norm(v);
    plan.inverse(buf);

    // r(tau) = sum x_t x_{t+tau} / sqrt(E[0, W-tau) * E[tau, W))
    for (std::size_t lag = lag_min > 0 ? lag_min - 1 : 0; lag <= lag_max + 1; ++lag) {
      const double e0 = energy_prefix[W - lag];
      const double e1 = energy_prefix[W] - energy_prefix[lag];
      const double d = std::sqrt(e0 * e1);
      r[lag] = d > 0.0 ? buf[lag].real() / d : 0.0;
    }
    double best = -1.0;
    for (std::size_t lag = lag_min; lag <= lag_max; ++lag) best = std::max(best, r[lag]);
    if (best < cfg.voicing_threshold) continue;
    // Shortest lag whose local peak comes close to the best one; avoids
    // picking a multiple of the period.
    std::size_t pick = 0;
    for (std::size_t lag = lag_min; lag <= lag_max; ++lag) {
      const bool local_peak = r[lag] >= r[lag - 1] && r[lag] >= r[lag + 1];
      if (local_peak && r[lag] >= 0.9 * best) {
        pick = lag;
        break;
      }
    }
    if (pick == 0) continue;
    const double a = r[pick - 1], b = r[pick], c = r[pick + 1];
    const double denom = a - 2.0 * b + c;
    double offset = denom < 0.0 ? 0.5 * (a - c) / denom : 0.0;
    offset = std::clamp(offset, -0.5, 0.5);
    const double f0 = sr / (static_cast<double>(pick) + offset);
    track.f0[n] = std::clamp(f0, cfg.f_min, cfg.f_max);
  }
  return track;
}

double F0Codebook::center(int level) const {
  if (level <= 0) return 0.0;
  return std::exp(log_min + (level - 1) * step());
}

int F0Codebook::level(double f0) const {
  if (f0 <= 0.0) return 0;
  const double s = step();
  const long k = s > 0.0 ? std::lround((std::log(f0) - log_min) / s) : 0;
  return static_cast<int>(std::clamp(k, 0L, static_cast<long>(kVoicedLevels - 1))) + 1;
}

F0Codebook F0Codebook::from_voiced(std::span<const double> f0_values) {
  std::vector<double> logs;
  for (double f : f0_values)
    if (f > 0.0) logs.push_back(std::log(f));
  if (logs.empty()) throw InputError("F0 codebook: no voiced frames in the training data");
  std::sort(logs.begin(), logs.end());
  const auto pct = [&](double q) {
    const double pos = q * (logs.size() - 1);
    const auto i = static_cast<std::size_t>(pos);
    const double frac = pos - i;
    return i + 1 < logs.size() ? logs[i] * (1.0 - frac) + logs[i + 1] * frac : logs[i];
  };
  F0Codebook cb{pct(0.01), pct(0.99)};
  if (cb.log_max - cb.log_min < 1e-3) {  // degenerate (near-constant) training F0
    cb.log_min -= 0.05;
    cb.log_max += 0.05;
  }
  return cb;
}

F0Codebook F0Codebook::from_tracks(std::span<const F0Track> tracks) {
  std::vector<double> all;
  for (const auto& t : tracks) all.insert(all.end(), t.f0.begin(), t.f0.end());
  return from_voiced(all);
}

QuantizedF0 quantize_f0(const F0Track& track, const F0Codebook& codebook) {
  QuantizedF0 q{std::vector<int>(track.size())};
  for (std::size_t n = 0; n < track.size(); ++n) q.levels[n] = codebook.level(track.f0[n]);
  return q;
}

F0Track dequantize_f0(const QuantizedF0& q, const F0Codebook& codebook, double frame_rate) {
  F0Track t{std::vector<double>(q.levels.size()), frame_rate};
  for (std::size_t n = 0; n < q.levels.size(); ++n) {
    if (q.levels[n] < 0 || q.levels[n] > F0Codebook::kVoicedLevels)
      throw InputError("dequantize_f0: level " + std::to_string(q.levels[n]) + " out of range");
    t.f0[n] = codebook.center(q.levels[n]);
  }
  return t;
}

}  // namespace vb::features
