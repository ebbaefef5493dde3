// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#include "vb/features/aperiodicity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "vb/common/error.hpp"
#include "vb/signal/fft.hpp"

namespace vb::features {
namespace {

constexpr int kSincHalfWidth = 16;

// Hann-tapered sinc interpolation; zero outside the signal.
double sample_at(const std::vector<double>& x, double pos) {
  const auto base = static_cast<long>(std::floor(pos));
  const double frac = pos - base;
  if (frac == 0.0) return base >= 0 && base < static_cast<long>(x.size()) ? x[base] : 0.0;
  double s = 0.0;
  for (int k = -kSincHalfWidth + 1; k <= kSincHalfWidth; ++k) {
    const long i = base + k;
    if (i < 0 || i >= static_cast<long>(x.size())) continue;
    const double d = k - frac;
    const double sinc = std::sin(std::numbers::pi * d) / (std::numbers::pi * d);
    const double taper = 0.5 + 0.5 * std::cos(std::numbers::pi * d / kSincHalfWidth);
    s += x[i] * sinc * taper;
  }
  return s;
}

// Tap offsets and weights of sample_at(x, t + shift) relative to sample t.
void interpolator_taps(double shift, std::vector<std::pair<long, double>>& taps) {
  const auto base = static_cast<long>(std::floor(shift));
  const double frac = shift - base;
  if (frac == 0.0) {
    taps.emplace_back(base, 1.0);
    return;
  }
  for (int k = -kSincHalfWidth + 1; k <= kSincHalfWidth; ++k) {
    const double d = k - frac;
    const double sinc = std::sin(std::numbers::pi * d) / (std::numbers::pi * d);
    const double taper = 0.5 + 0.5 * std::cos(std::numbers::pi * d / kSincHalfWidth);
    taps.emplace_back(base + k, sinc * taper);
  }
}

// |1 - (D(-P) + D(+P)) / 2|^2 at each bin: the residual filter's power response.
std::vector<double> residual_response(double period, std::size_t W) {
  std::vector<std::pair<long, double>> taps;
  interpolator_taps(-period, taps);
  interpolator_taps(period, taps);
  const std::size_t bins = W / 2 + 1;
  std::vector<double> out(bins);
  for (std::size_t f = 0; f < bins; ++f) {
    const double w = 2.0 * std::numbers::pi * static_cast<double>(f) / static_cast<double>(W);
    signal::cplx k{1.0, 0.0};
    for (const auto& [offset, weight] : taps) k -= 0.5 * weight * std::polar(1.0, w * offset);
    out[f] = std::norm(k);
  }
  return out;
}

}  // namespace

std::vector<std::size_t> band_of_bins(std::size_t bins, std::size_t bands) {
  std::vector<std::size_t> out(bins);
  const double last = static_cast<double>(bins - 1);
  for (std::size_t f = 0; f < bins; ++f) {
    const auto b = static_cast<std::size_t>(std::floor(static_cast<double>(f) / last * bands));
    out[f] = std::min(b, bands - 1);
  }
  return out;
}

std::vector<double> interpolate_bands(std::span<const double> band_values, std::size_t bins) {
  const std::size_t B = band_values.size();
  std::vector<double> out(bins);
  const double last = static_cast<double>(bins - 1);
  for (std::size_t f = 0; f < bins; ++f) {
    // position in band units where band b's centre sits at b
    const double pos = static_cast<double>(f) / last * B - 0.5;
    if (pos <= 0.0) {
      out[f] = band_values[0];
    } else if (pos >= B - 1) {
      out[f] = band_values[B - 1];
    } else {
      const auto i = static_cast<std::size_t>(pos);
      const double w = pos - i;
      out[f] = (1.0 - w) * band_values[i] + w * band_values[i + 1];
    }
  }
  return out;
}

BandAperiodicity estimate_band_aperiodicity(const signal::Waveform& wave, const F0Track& f0,
                                            const signal::FrameConfig& frames, std::size_t bands,
                                            double band_gate) {
  frames.validate();
  if (bands == 0) throw ConfigError("estimate_band_aperiodicity: need at least one band");
  const std::size_t n_frames = signal::frame_count(wave.size(), frames);
  if (f0.size() != n_frames)
    throw ShapeError("estimate_band_aperiodicity", "F0 track has " + std::to_string(f0.size()) +
                                                       " frames, waveform gives " + std::to_string(n_frames));
  const std::size_t W = frames.frame_length;
  const std::size_t bins = W / 2 + 1;
  const auto win = signal::make_window(signal::WindowType::hann, W);
  const auto band = band_of_bins(bins, bands);
  const auto& plan = signal::fft_plan(W);

  BandAperiodicity out{Matrix(n_frames, bands, 1.0)};
  std::vector<signal::cplx> bx(W), bp(W);
  std::vector<double> ex(bands), comb(bands), ee(bands), count(bands, 0.0);
  for (std::size_t f = 0; f < bins; ++f) count[band[f]] += 1.0;
  for (std::size_t n = 0; n < n_frames; ++n) {
    if (f0.f0[n] <= 0.0) continue;
    const double period = wave.sample_rate / f0.f0[n];
    const std::size_t start = n * frames.hop;
    for (std::size_t t = 0; t < W; ++t) {
      const double pos = static_cast<double>(start + t);
      const double x = wave.samples[start + t];
      const double periodic = 0.5 * (sample_at(wave.samples, pos - period) + sample_at(wave.samples, pos + period));
      bx[t] = x * win[t];
      bp[t] = periodic * win[t];
    }
    plan.forward(bx);
    plan.forward(bp);
    const auto response = residual_response(period, W);
    std::fill(ex.begin(), ex.end(), 0.0);
    std::fill(comb.begin(), comb.end(), 0.0);
    std::fill(ee.begin(), ee.end(), 0.0);
    for (std::size_t f = 0; f < bins; ++f) {
      ex[band[f]] += std::norm(bx[f]);
      ee[band[f]] += std::norm(bx[f] - bp[f]);
      comb[band[f]] += response[f];
    }
    const double strongest = *std::max_element(ex.begin(), ex.end());
    auto row = out.values.row(n);
    for (std::size_t b = 0; b < bands; ++b) {
      if (strongest <= 0.0 || ex[b] < band_gate * strongest) continue;  // stays 1
      const double noise_gain = comb[b] / count[b];
      row[b] = noise_gain > 0.0 ? std::clamp(ee[b] / (noise_gain * ex[b]), 0.0, 1.0) : 1.0;
    }
  }
  return out;
}

}  // namespace vb::features
