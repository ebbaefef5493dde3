// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "vb/common/matrix.hpp"
#include "vb/signal/stft.hpp"

namespace vb::features {

/// Frequency-warped cepstra, one row per frame. Coefficients use the causal
/// convention: log|H(w)| = c_0 + sum_{m>=1} c_m cos(m w), so c_m for m >= 1 is
/// twice the symmetric real cepstrum.
struct Cepstra {
  Matrix coeffs;
  double warp_alpha = 0.0;

  std::size_t frames() const { return coeffs.rows(); }
  std::size_t order() const { return coeffs.cols(); }
};

/// Relative spectral floor applied before taking logs.
inline constexpr double kSpectralFloor = 1e-10;
/// Absolute floor, used when a whole frame is zero.
inline constexpr double kAbsoluteFloor = 1e-20;

/// Log amplitude -> real cepstrum -> all-pass warp -> first `order` terms.
/// alpha = 0 disables warping. Throws ConfigError when order exceeds the
/// number of bins or |alpha| >= 1.
Cepstra cepstral_analysis(const signal::PowerSpectrum& p, std::size_t order, double alpha);

/// Inverse of the analysis chain on `bins` one-sided bins: unwarp, zero-pad,
/// DFT, exp. Returns frames x bins linear amplitudes (sqrt of power).
Matrix cepstra_to_amplitude(const Cepstra& c, std::size_t bins);

/// Minimum-phase complex spectrum with the given per-frame amplitudes
/// (frames x bins, bins = T/2 + 1 for an even DFT length T).
signal::ComplexSpectrum minimum_phase_spectrum(const Matrix& amplitude);

/// All-pass frequency transform of a causal cepstrum (SPTK freqt recursion).
/// Returns out_order + 1 coefficients.
std::vector<double> freqt(std::span<const double> c, std::size_t out_order, double alpha);

/// Moving average of each frame's power along frequency, with a per-frame
/// width in bins (edges are mirrored). Flattens harmonic combs when the width
/// equals the F0 spacing so the cepstral envelope tracks the mean power.
signal::PowerSpectrum smooth_power_spectrum(const signal::PowerSpectrum& p,
                                            std::span<const double> width_bins);

}  // namespace vb::features
