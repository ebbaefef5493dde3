// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "vb/common/matrix.hpp"
#include "vb/features/f0.hpp"
#include "vb/signal/stft.hpp"
#include "vb/signal/waveform.hpp"

namespace vb::features {

/// Per-frame, per-band aperiodic energy ratio in [0, 1].
struct BandAperiodicity {
  Matrix values;

  std::size_t frames() const { return values.rows(); }
  std::size_t bands() const { return values.cols(); }
};

/// Equal-width bands over [0, Nyquist]. Returns the band of each of `bins`
/// one-sided bins.
std::vector<std::size_t> band_of_bins(std::size_t bins, std::size_t bands);

/// Per-bin values linearly interpolated between band centres (flat beyond
/// the outermost centres).
std::vector<double> interpolate_bands(std::span<const double> band_values, std::size_t bins);

/// Comb-filter residual ratio. For each voiced frame the periodic part is
/// estimated as (x[t - P] + x[t + P]) / 2 with P = sr / f0 (band-limited
/// fractional delay). Per band, BAP = |X - P|^2 / (g_b |X|^2) clamped to
/// [0, 1], where g_b is the band mean of the residual filter's power response
/// (about (1 - cos(w P))^2). So a periodic frame gives 0 and white noise averages 1.
/// Bands with energy below `band_gate` of the strongest band, and unvoiced
/// frames, are 1.
BandAperiodicity estimate_band_aperiodicity(const signal::Waveform& wave, const F0Track& f0,
                                            const signal::FrameConfig& frames, std::size_t bands = 25,
                                            double band_gate = 1e-6);

}  // namespace vb::features
