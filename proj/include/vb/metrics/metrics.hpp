// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "vb/common/matrix.hpp"
#include "vb/signal/stft.hpp"
#include "vb/signal/waveform.hpp"

namespace vb::metrics {

/// Power floor for log outputs: -120 dB.
inline constexpr double kPowerFloor = 1e-12;
/// Bins whose magnitude is below this in either frame report zero IF deviation.
inline constexpr double kIfGate = 1e-8;

struct GvReport {
  std::vector<std::vector<double>> per_utterance;  // utterance x dim
  std::vector<double> mean;                         // over utterances

  nlohmann::json to_json() const;
};

/// Population variance of each column.
std::vector<double> utterance_variance(const Matrix& features);
/// Per-utterance variance, then the mean over utterances. Throws InputError
/// for an empty set or an empty utterance.
GvReport global_variance(const std::vector<Matrix>& set);

enum class MsWindow { hann, rectangular };

struct ModSpectrumReport {
  std::size_t dim = 0;
  std::size_t fft_size = 0;
  std::vector<double> freq_hz;   // fft_size / 2 + 1 points up to frame_rate / 2
  std::vector<double> power;     // one-sided; sums to the variance with the rectangular window
  std::vector<double> log_power; // 10 log10(max(power, kPowerFloor))

  std::size_t peak_bin() const;
  nlohmann::json to_json() const;
};

/// DFT of the mean-removed trajectory of column `dim`, windowed and
/// zero-padded to fft_size (0: next power of two >= frames). Power is
/// |X_k|^2 / (fft_size * sum w^2), doubled for interior bins.
ModSpectrumReport modulation_spectrum(const Matrix& features, std::size_t dim, std::size_t fft_size = 0,
                                      double frame_rate = 200.0, MsWindow window = MsWindow::hann);

struct IfMap {
  Matrix deviation_hz;  // frames x bins; frame 0 is 0
  Matrix magnitude;     // |STFT|
  double bin_width_hz = 0.0;
};

/// Phase advance of each bin between consecutive frames minus the advance of
/// the bin centre frequency, wrapped to (-pi, pi] and converted to Hz.
/// Throws ConfigError for a non-COLA frame config.
IfMap instantaneous_frequency(const signal::Waveform& wave, const signal::FrameConfig& cfg);

/// Standard deviation of IF deviations over frames with mask[n] set (frame
/// 0 excluded) and bins within `rel_db` of the frame's peak magnitude.
double if_deviation_std(const IfMap& map, const std::vector<bool>& frame_mask, double rel_db = -40.0);

/// RMS over frames and bins of 20 log10(a / b); both sides floored at
/// `floor`. Throws ShapeError on a shape mismatch.
double log_spectral_distortion(const Matrix& a, const Matrix& b, double floor = 1e-10);

/// dir / "{utterance}.{metric}.csv".
std::filesystem::path report_path(const std::filesystem::path& dir, const std::string& utterance,
                                  const std::string& metric);

void write_gv_csv(const std::filesystem::path& path, const std::vector<double>& variance);
void write_ms_csv(const std::filesystem::path& path, const ModSpectrumReport& ms);
/// Long format: frame, bin, freq_hz, deviation_hz, magnitude.
void write_if_csv(const std::filesystem::path& path, const IfMap& map);

}  // namespace vb::metrics
