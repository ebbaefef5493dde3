// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#include "vb/signal/stft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "vb/common/error.hpp"

namespace vb::signal {

WindowType parse_window(const std::string& name) {
  if (name == "rectangular" || name == "rect") return WindowType::rectangular;
  if (name == "hann" || name == "hanning") return WindowType::hann;
  if (name == "hamming") return WindowType::hamming;
  throw ConfigError("unknown window type '" + name + "'");
}

std::string to_string(WindowType w) {
  switch (w) {
    case WindowType::rectangular: return "rectangular";
    case WindowType::hann: return "hann";
    case WindowType::hamming: return "hamming";
  }
  return "?";
}

std::vector<double> make_window(WindowType type, std::size_t n) {
  std::vector<double> w(n, 1.0);
  const double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t i = 0; i < n; ++i) {
    const double phase = two_pi * static_cast<double>(i) / static_cast<double>(n);
    switch (type) {
      case WindowType::rectangular: break;
      case WindowType::hann: w[i] = 0.5 - 0.5 * std::cos(phase); break;
      case WindowType::hamming: w[i] = 0.54 - 0.46 * std::cos(phase); break;
    }
  }
  return w;
}

void FrameConfig::validate() const {
  if (frame_length == 0 || hop == 0 || hop > frame_length)
    throw ConfigError("frame config requires 0 < hop <= frame_length (got frame " +
                      std::to_string(frame_length) + ", hop " + std::to_string(hop) + ")");
}

bool is_cola(const FrameConfig& cfg) {
  cfg.validate();
  const auto w = make_window(cfg.window, cfg.frame_length);
  std::vector<double> sum(cfg.hop, 0.0);
  for (std::size_t i = 0; i < w.size(); ++i) sum[i % cfg.hop] += w[i];
  const auto [lo, hi] = std::minmax_element(sum.begin(), sum.end());
  return *lo > 0.0 && (*hi - *lo) <= 1e-9 * *hi;
}

std::size_t frame_count(std::size_t length, const FrameConfig& cfg) {
  if (length < cfg.frame_length) return 0;
  return (length - cfg.frame_length) / cfg.hop + 1;
}

Matrix frame_signal(const Waveform& wave, const FrameConfig& cfg) {
  cfg.validate();
  if (wave.size() < cfg.frame_length)
    throw InputError("frame_signal: waveform too short (" + std::to_string(wave.size()) +
                     " samples < frame length " + std::to_string(cfg.frame_length) + ")");
  const std::size_t n = frame_count(wave.size(), cfg);
  const auto w = make_window(cfg.window, cfg.frame_length);
  Matrix frames(n, cfg.frame_length);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = frames.row(i);
    const double* src = wave.samples.data() + i * cfg.hop;
    for (std::size_t t = 0; t < cfg.frame_length; ++t) row[t] = src[t] * w[t];
  }
  return frames;
}

PowerSpectrum power_spectrum(const ComplexSpectrum& s) {
  PowerSpectrum p{Matrix(s.frames, s.bins)};
  for (std::size_t i = 0; i < s.data.size(); ++i) {
    const double a = s.data[i].real(), b = s.data[i].imag();
    p.values.data()[i] = a * a + b * b;
  }
  return p;
}

Matrix magnitude(const ComplexSpectrum& s) {
  Matrix m(s.frames, s.bins);
  for (std::size_t i = 0; i < s.data.size(); ++i) m.data()[i] = std::abs(s.data[i]);
  return m;
}

namespace {

void transform_frame(const Fft& plan, const Matrix& frames, std::size_t i, ComplexSpectrum& out) {
  std::vector<cplx> buf(frames.row(i).begin(), frames.row(i).end());
  plan.forward(buf);
  std::copy_n(buf.begin(), out.bins, out.data.begin() + i * out.bins);
}

// Inverse-transforms frame i and returns the windowed time-domain frame.
void synth_frame(const Fft& plan, const ComplexSpectrum& spec, const std::vector<double>& win,
                 std::size_t i, std::vector<cplx>& buf, std::vector<double>& out) {
  const std::size_t n = win.size();
  buf.assign(n, cplx{});
  buf[0] = {spec.at(i, 0).real(), 0.0};
  for (std::size_t f = 1; f < spec.bins; ++f) {
    buf[f] = spec.at(i, f);
    if (n - f != f) buf[n - f] = std::conj(spec.at(i, f));
  }
  if (n % 2 == 0) buf[n / 2] = {spec.at(i, n / 2).real(), 0.0};
  plan.inverse(buf);
  out.resize(n);
  for (std::size_t t = 0; t < n; ++t) out[t] = buf[t].real() * win[t];
}

void check_istft(const ComplexSpectrum& spec, const FrameConfig& cfg) {
  if (!is_cola(cfg))
    throw ConfigError("istft: frame config (frame " + std::to_string(cfg.frame_length) + ", hop " +
                      std::to_string(cfg.hop) + ", " + to_string(cfg.window) +
                      ") is not constant-overlap-add");
  if (spec.frames > 0 && spec.bins != cfg.frame_length / 2 + 1)
    throw ShapeError("istft", "bin count does not match frame length");
}

Waveform finish_ola(std::vector<double>&& acc, std::vector<double>&& norm, int sr) {
  Waveform out{std::move(acc), sr};
  for (std::size_t t = 0; t < out.samples.size(); ++t)
    out.samples[t] = norm[t] > 0.0 ? out.samples[t] / norm[t] : 0.0;
  return out;
}

}  // namespace

ComplexSpectrum stft(const Waveform& wave, const FrameConfig& cfg) {
  const Matrix frames = frame_signal(wave, cfg);
  const Fft& plan = fft_plan(cfg.frame_length);
  ComplexSpectrum out(frames.rows(), cfg.frame_length / 2 + 1);
  const auto n = static_cast<std::ptrdiff_t>(frames.rows());
#pragma omp parallel for schedule(static) if (n > 8)
  for (std::ptrdiff_t i = 0; i < n; ++i) transform_frame(plan, frames, i, out);
  return out;
}

Waveform istft(const ComplexSpectrum& spec, const FrameConfig& cfg, int sample_rate) {
  check_istft(spec, cfg);
  const auto win = make_window(cfg.window, cfg.frame_length);
  const std::size_t len = spec.frames == 0 ? 0 : (spec.frames - 1) * cfg.hop + cfg.frame_length;
  const Fft& plan = fft_plan(cfg.frame_length);
  // Frames are synthesised in parallel; the overlap-add runs in frame order
  // so the result matches the serial path bit for bit.
  Matrix synth(spec.frames, cfg.frame_length);
  const auto n = static_cast<std::ptrdiff_t>(spec.frames);
#pragma omp parallel if (n > 8)
  {
    std::vector<cplx> buf;
    std::vector<double> frame;
#pragma omp for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      synth_frame(plan, spec, win, i, buf, frame);
      std::copy(frame.begin(), frame.end(), synth.row(i).begin());
    }
  }
  std::vector<double> acc(len, 0.0), norm(len, 0.0);
  for (std::size_t i = 0; i < spec.frames; ++i) {
    const auto row = synth.row(i);
    for (std::size_t t = 0; t < cfg.frame_length; ++t) {
      acc[i * cfg.hop + t] += row[t];
      norm[i * cfg.hop + t] += win[t] * win[t];
    }
  }
  return finish_ola(std::move(acc), std::move(norm), sample_rate);
}

namespace serial {

ComplexSpectrum stft(const Waveform& wave, const FrameConfig& cfg) {
  const Matrix frames = frame_signal(wave, cfg);
  const Fft& plan = fft_plan(cfg.frame_length);
  ComplexSpectrum out(frames.rows(), cfg.frame_length / 2 + 1);
  for (std::size_t i = 0; i < frames.rows(); ++i) transform_frame(plan, frames, i, out);
  return out;
}

Waveform istft(const ComplexSpectrum& spec, const FrameConfig& cfg, int sample_rate) {
  check_istft(spec, cfg);
  const auto win = make_window(cfg.window, cfg.frame_length);
  const std::size_t len = spec.frames == 0 ? 0 : (spec.frames - 1) * cfg.hop + cfg.frame_length;
  const Fft& plan = fft_plan(cfg.frame_length);
  std::vector<double> acc(len, 0.0), norm(len, 0.0);
  std::vector<cplx> buf;
  std::vector<double> frame;
  for (std::size_t i = 0; i < spec.frames; ++i) {
    synth_frame(plan, spec, win, i, buf, frame);
    for (std::size_t t = 0; t < cfg.frame_length; ++t) {
      acc[i * cfg.hop + t] += frame[t];
      norm[i * cfg.hop + t] += win[t] * win[t];
    }
  }
  return finish_ola(std::move(acc), std::move(norm), sample_rate);
}

}  // namespace serial
}  // namespace vb::signal
