// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "vb/common/matrix.hpp"
#include "vb/signal/fft.hpp"
#include "vb/signal/waveform.hpp"

namespace vb::signal {

enum class WindowType { rectangular, hann, hamming };

WindowType parse_window(const std::string& name);
std::string to_string(WindowType w);

/// Periodic (DFT-even) window of length n.
std::vector<double> make_window(WindowType type, std::size_t n);

struct FrameConfig {
  std::size_t frame_length = 1024;
  std::size_t hop = 256;
  WindowType window = WindowType::hann;

  /// Throws ConfigError unless 0 < hop <= frame_length.
  void validate() const;
};

/// True when shifted copies of the window at `hop` sum to a constant.
bool is_cola(const FrameConfig& cfg);

/// Number of whole frames that fit; frames that run past the end are dropped.
std::size_t frame_count(std::size_t length, const FrameConfig& cfg);

/// N x frame_length matrix of windowed frames; frame n starts at n * hop.
Matrix frame_signal(const Waveform& wave, const FrameConfig& cfg);

/// One-sided complex spectra, frames x bins, row-major.
struct ComplexSpectrum {
  std::size_t frames = 0;
  std::size_t bins = 0;
  std::vector<cplx> data;

  ComplexSpectrum() = default;
  ComplexSpectrum(std::size_t n, std::size_t f) : frames(n), bins(f), data(n * f) {}
  cplx& at(std::size_t n, std::size_t f) { return data[n * bins + f]; }
  const cplx& at(std::size_t n, std::size_t f) const { return data[n * bins + f]; }
};

/// p[n][f] = a^2 + b^2 of a ComplexSpectrum.
struct PowerSpectrum {
  Matrix values;
  std::size_t frames() const { return values.rows(); }
  std::size_t bins() const { return values.cols(); }
};

PowerSpectrum power_spectrum(const ComplexSpectrum& s);

/// |s| per bin, frames x bins.
Matrix magnitude(const ComplexSpectrum& s);

/// Frames are transformed in parallel with OpenMP.
ComplexSpectrum stft(const Waveform& wave, const FrameConfig& cfg);

/// Least-squares overlap-add inverse (weighted by the analysis window).
/// Output length is (frames - 1) * hop + frame_length; samples no window
/// covers are 0. Requires a COLA config.
Waveform istft(const ComplexSpectrum& spec, const FrameConfig& cfg, int sample_rate);

/// Single-threaded reference versions, kept for tests and the benchmark.
namespace serial {
ComplexSpectrum stft(const Waveform& wave, const FrameConfig& cfg);
Waveform istft(const ComplexSpectrum& spec, const FrameConfig& cfg, int sample_rate);
}  // namespace serial

}  // namespace vb::signal
