// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#include "vb/metrics/metrics.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include "vb/common/error.hpp"
#include "vb/signal/fft.hpp"

namespace vb::metrics {
namespace {

std::ofstream open_csv(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out.precision(17);
  return out;
}

double wrap_phase(double x) {
  x = std::remainder(x, 2.0 * std::numbers::pi);
  return x <= -std::numbers::pi ? x + 2.0 * std::numbers::pi : x;
}

}  // namespace

nlohmann::json GvReport::to_json() const { return {{"per_utterance", per_utterance}, {"mean", mean}}; }

std::vector<double> utterance_variance(const Matrix& x) {
  if (x.rows() == 0) throw InputError("global_variance: empty utterance");
  const std::size_t N = x.rows(), M = x.cols();
  std::vector<double> mean(M, 0.0), var(M, 0.0);
  for (std::size_t n = 0; n < N; ++n)
    for (std::size_t j = 0; j < M; ++j) mean[j] += x(n, j);
  for (double& m : mean) m /= static_cast<double>(N);
  for (std::size_t n = 0; n < N; ++n)
    for (std::size_t j = 0; j < M; ++j) {
      const double d = x(n, j) - mean[j];
      var[j] += d * d;
    }
  for (double& v : var) v /= static_cast<double>(N);
  return var;
}

GvReport global_variance(const std::vector<Matrix>& set) {
  if (set.empty()) throw InputError("global_variance: empty set");
  GvReport r;
  const std::size_t M = set.front().cols();
  r.mean.assign(M, 0.0);
  for (const auto& u : set) {
    if (u.cols() != M) throw ShapeError("global_variance", "utterances differ in dimension");
    r.per_utterance.push_back(utterance_variance(u));
    for (std::size_t j = 0; j < M; ++j) r.mean[j] += r.per_utterance.back()[j];
  }
  for (double& m : r.mean) m /= static_cast<double>(set.size());
  return r;
}

std::size_t ModSpectrumReport::peak_bin() const {
  std::size_t best = 0;
  for (std::size_t k = 1; k < power.size(); ++k)
    if (power[k] > power[best]) best = k;
  return best;
}

nlohmann::json ModSpectrumReport::to_json() const {
  return {{"dim", dim}, {"fft_size", fft_size}, {"freq_hz", freq_hz}, {"log_power_db", log_power}};
}

ModSpectrumReport modulation_spectrum(const Matrix& features, std::size_t dim, std::size_t fft_size,
                                      double frame_rate, MsWindow window) {
  if (dim >= features.cols())
    throw ConfigError("modulation_spectrum: dimension " + std::to_string(dim) + " out of range (" +
                      std::to_string(features.cols()) + " dims)");
  const std::size_t N = features.rows();
  if (N < 2) throw InputError("modulation_spectrum: need at least two frames");
  if (fft_size == 0) fft_size = signal::next_power_of_two(N);
  if (fft_size < N || fft_size % 2 != 0)
    throw ConfigError("modulation_spectrum: fft size must be even and >= the trajectory length");

  double mean = 0.0;
  for (std::size_t n = 0; n < N; ++n) mean += features(n, dim);
  mean /= static_cast<double>(N);
  const auto w = window == MsWindow::hann ? signal::make_window(signal::WindowType::hann, N)
                                          : std::vector<double>(N, 1.0);
  double wsum = 0.0;
  std::vector<double> x(fft_size, 0.0);
  for (std::size_t n = 0; n < N; ++n) {
    x[n] = (features(n, dim) - mean) * w[n];
    wsum += w[n] * w[n];
  }
  const auto X = signal::dft_forward(x);

  ModSpectrumReport r;
  r.dim = dim;
  r.fft_size = fft_size;
  const std::size_t K = fft_size / 2 + 1;
  for (std::size_t k = 0; k < K; ++k) {
    const double scale = (k == 0 || k + 1 == K) ? 1.0 : 2.0;
    const double p = scale * std::norm(X[k]) / (static_cast<double>(fft_size) * wsum);
    r.freq_hz.push_back(frame_rate * static_cast<double>(k) / static_cast<double>(fft_size));
    r.power.push_back(p);
    r.log_power.push_back(10.0 * std::log10(std::max(p, kPowerFloor)));
  }
  return r;
}

IfMap instantaneous_frequency(const signal::Waveform& wave, const signal::FrameConfig& cfg) {
  cfg.validate();
  if (!signal::is_cola(cfg)) throw ConfigError("instantaneous_frequency: frame config is not constant-overlap-add");
  const auto spec = signal::stft(wave, cfg);
  IfMap m;
  m.magnitude = signal::magnitude(spec);
  m.deviation_hz = Matrix(spec.frames, spec.bins);
  const double L = static_cast<double>(cfg.frame_length), hop = static_cast<double>(cfg.hop);
  m.bin_width_hz = wave.sample_rate / L;
  const double to_hz = wave.sample_rate / (2.0 * std::numbers::pi * hop);
  for (std::size_t n = 1; n < spec.frames; ++n)
    for (std::size_t f = 0; f < spec.bins; ++f) {
      if (m.magnitude(n, f) < kIfGate || m.magnitude(n - 1, f) < kIfGate) continue;
      const double advance = 2.0 * std::numbers::pi * static_cast<double>(f) * hop / L;
      const double d = std::arg(spec.at(n, f)) - std::arg(spec.at(n - 1, f)) - advance;
      m.deviation_hz(n, f) = wrap_phase(d) * to_hz;
    }
  return m;
}

double if_deviation_std(const IfMap& map, const std::vector<bool>& mask, double rel_db) {
  if (mask.size() != map.deviation_hz.rows()) throw ShapeError("if_deviation_std", "one mask entry per frame expected");
  const double rel = std::pow(10.0, rel_db / 20.0);
  double s = 0.0, s2 = 0.0, count = 0.0;
  for (std::size_t n = 1; n < mask.size(); ++n) {
    if (!mask[n]) continue;
    double peak = 0.0;
    for (double v : map.magnitude.row(n)) peak = std::max(peak, v);
    if (peak < kIfGate) continue;
    for (std::size_t f = 0; f < map.magnitude.cols(); ++f) {
      if (map.magnitude(n, f) < rel * peak) continue;
      const double d = map.deviation_hz(n, f);
      s += d;
      s2 += d * d;
      count += 1.0;
    }
  }
  if (count == 0.0) return 0.0;
  const double mean = s / count;
  return std::sqrt(std::max(0.0, s2 / count - mean * mean));
}

double log_spectral_distortion(const Matrix& a, const Matrix& b, double floor) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ShapeError("log_spectral_distortion", "amplitude shapes differ");
  if (a.size() == 0) throw InputError("log_spectral_distortion: empty input");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = 20.0 * std::log10(std::max(a.values()[i], floor) / std::max(b.values()[i], floor));
    s += d * d;
  }
  return std::sqrt(s / static_cast<double>(a.size()));
}

std::filesystem::path report_path(const std::filesystem::path& dir, const std::string& utterance,
                                  const std::string& metric) {
  return dir / (utterance + "." + metric + ".csv");
}

void write_gv_csv(const std::filesystem::path& path, const std::vector<double>& variance) {
  auto out = open_csv(path);
  out << "dim,variance\n";
  for (std::size_t j = 0; j < variance.size(); ++j) out << j << ',' << variance[j] << '\n';
}

void write_ms_csv(const std::filesystem::path& path, const ModSpectrumReport& ms) {
  auto out = open_csv(path);
  out << "bin,freq_hz,log_power_db\n";
  for (std::size_t k = 0; k < ms.power.size(); ++k)
    out << k << ',' << ms.freq_hz[k] << ',' << ms.log_power[k] << '\n';
}

void write_if_csv(const std::filesystem::path& path, const IfMap& map) {
  auto out = open_csv(path);
  out << "frame,bin,freq_hz,deviation_hz,magnitude\n";
  for (std::size_t n = 0; n < map.deviation_hz.rows(); ++n)
    for (std::size_t f = 0; f < map.deviation_hz.cols(); ++f)
      out << n << ',' << f << ',' << static_cast<double>(f) * map.bin_width_hz << ',' << map.deviation_hz(n, f) << ','
          << map.magnitude(n, f) << '\n';
}

}  // namespace vb::metrics
