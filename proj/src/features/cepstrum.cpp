// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#include "vb/features/cepstrum.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vb/common/error.hpp"
#include "vb/signal/fft.hpp"

namespace vb::features {

using signal::cplx;

namespace {

std::size_t dft_length(std::size_t bins) {
  if (bins < 2) throw ConfigError("cepstral processing needs at least 2 bins");
  return 2 * (bins - 1);
}

// Symmetric real cepstrum (length T) of a frame's log amplitude.
std::vector<double> real_cepstrum(std::span<const double> log_amp) {
  std::vector<cplx> bins(log_amp.begin(), log_amp.end());
  return signal::dft_inverse(bins);
}

// Causal fold: keep c_0 and the Nyquist term, double 0 < m < T/2.
std::vector<double> fold_causal(const std::vector<double>& r) {
  const std::size_t half = r.size() / 2;
  std::vector<double> c(half + 1);
  c[0] = r[0];
  for (std::size_t m = 1; m < half; ++m) c[m] = 2.0 * r[m];
  c[half] = r[half];
  return c;
}

std::vector<double> log_amplitude(std::span<const double> power) {
  const double peak = *std::max_element(power.begin(), power.end());
  const double floor = std::max(kSpectralFloor * peak, kAbsoluteFloor);
  std::vector<double> out(power.size());
  for (std::size_t f = 0; f < power.size(); ++f) out[f] = 0.5 * std::log(std::max(power[f], floor));
  return out;
}

}  // namespace

std::vector<double> freqt(std::span<const double> c, std::size_t out_order, double alpha) {
  const std::size_t m2 = out_order;
  std::vector<double> cur(m2 + 1, 0.0), prev(m2 + 1, 0.0);
  const double beta = 1.0 - alpha * alpha;
  for (std::size_t k = c.size(); k-- > 0;) {
    cur[0] = c[k] + alpha * prev[0];
    if (m2 >= 1) cur[1] = beta * prev[0] + alpha * prev[1];
    for (std::size_t j = 2; j <= m2; ++j) cur[j] = prev[j - 1] + alpha * (prev[j] - cur[j - 1]);
    std::swap(cur, prev);
  }
  return prev;
}

Cepstra cepstral_analysis(const signal::PowerSpectrum& p, std::size_t order, double alpha) {
  const std::size_t bins = p.bins();
  if (order == 0 || order > bins)
    throw ConfigError("cepstral order " + std::to_string(order) + " must be in [1, " + std::to_string(bins) +
                      "] for " + std::to_string(bins) + " bins");
  if (!(std::abs(alpha) < 1.0)) throw ConfigError("warping coefficient must satisfy |alpha| < 1");
  dft_length(bins);
  Cepstra out{Matrix(p.frames(), order), alpha};
  for (std::size_t n = 0; n < p.frames(); ++n) {
    const auto causal = fold_causal(real_cepstrum(log_amplitude(p.values.row(n))));
    auto row = out.coeffs.row(n);
    if (alpha == 0.0) {
      std::copy_n(causal.begin(), order, row.begin());
    } else {
      const auto warped = freqt(causal, order - 1, alpha);
      std::copy(warped.begin(), warped.end(), row.begin());
    }
  }
  return out;
}

Matrix cepstra_to_amplitude(const Cepstra& c, std::size_t bins) {
  const std::size_t T = dft_length(bins);
  const std::size_t half = T / 2;
  Matrix amp(c.frames(), bins);
  std::vector<double> r(T);
  for (std::size_t n = 0; n < c.frames(); ++n) {
    const auto row = c.coeffs.row(n);
    std::vector<double> causal(half + 1, 0.0);
    if (c.warp_alpha == 0.0) {
      std::copy_n(row.begin(), std::min(row.size(), half + 1), causal.begin());
    } else {
      causal = freqt(row, half, -c.warp_alpha);
    }
    std::fill(r.begin(), r.end(), 0.0);
    r[0] = causal[0];
    for (std::size_t m = 1; m < half; ++m) r[m] = r[T - m] = 0.5 * causal[m];
    r[half] = causal[half];
    const auto spec = signal::dft_forward(r);
    for (std::size_t f = 0; f < bins; ++f) amp(n, f) = std::exp(spec[f].real());
  }
  return amp;
}

signal::ComplexSpectrum minimum_phase_spectrum(const Matrix& amplitude) {
  const std::size_t bins = amplitude.cols();
  const std::size_t T = dft_length(bins);
  signal::ComplexSpectrum out(amplitude.rows(), bins);
  std::vector<double> power(bins);
  for (std::size_t n = 0; n < amplitude.rows(); ++n) {
    const auto a = amplitude.row(n);
    for (std::size_t f = 0; f < bins; ++f) power[f] = a[f] * a[f];
    auto causal = fold_causal(real_cepstrum(log_amplitude(power)));
    causal.resize(T, 0.0);
    const auto logspec = signal::dft_forward(causal);
    for (std::size_t f = 0; f < bins; ++f) out.at(n, f) = std::exp(logspec[f]);
  }
  return out;
}

signal::PowerSpectrum smooth_power_spectrum(const signal::PowerSpectrum& p, std::span<const double> width_bins) {
  if (width_bins.size() != p.frames()) throw ShapeError("smooth_power_spectrum", "one width per frame expected");
  const std::size_t bins = p.bins();
  signal::PowerSpectrum out{Matrix(p.frames(), bins)};
  const auto mirror = [&](long f) {
    const long last = static_cast<long>(bins) - 1;
    while (f < 0 || f > last) f = f < 0 ? -f : 2 * last - f;
    return static_cast<std::size_t>(f);
  };
  for (std::size_t n = 0; n < p.frames(); ++n) {
    const long half = std::max(0L, std::lround(0.5 * (width_bins[n] - 1.0)));
    const auto row = p.values.row(n);
    auto dst = out.values.row(n);
    if (half == 0 || static_cast<std::size_t>(half) >= bins) {
      std::copy(row.begin(), row.end(), dst.begin());
      continue;
    }
    const double norm = 1.0 / static_cast<double>(2 * half + 1);
    for (std::size_t f = 0; f < bins; ++f) {
      double s = 0.0;
      for (long k = -half; k <= half; ++k) s += row[mirror(static_cast<long>(f) + k)];
      dst[f] = s * norm;
    }
  }
  return out;
}

}  // namespace vb::features
