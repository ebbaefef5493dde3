// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#include <omp.h>

#include <cmath>
#include <complex>
#include <filesystem>
#include <numeric>

#include "doctest.h"
#include "test_util.hpp"
#include "vb/common/error.hpp"
#include "vb/signal/fft.hpp"
#include "vb/signal/mulaw.hpp"
#include "vb/signal/stft.hpp"
#include "vb/signal/wav_io.hpp"

using namespace vb::signal;
using vb::Rng;

TEST_CASE("frame_signal counts and windows frames") {
  Waveform w{std::vector<double>(1000), 16000};
  std::iota(w.samples.begin(), w.samples.end(), 0.0);
  const auto frames = frame_signal(w, {400, 200, WindowType::rectangular});
  REQUIRE(frames.rows() == 4);
  for (std::size_t t = 0; t < 400; ++t) CHECK(frames(0, t) == static_cast<double>(t));
  CHECK(frames(3, 0) == 600.0);

  Waveform zero{std::vector<double>(1000, 0.0), 16000};
  const auto zf = frame_signal(zero, {400, 200, WindowType::hann});
  CHECK(std::all_of(zf.values().begin(), zf.values().end(), [](double x) { return x == 0.0; }));

  Waveform ones{std::vector<double>(64, 1.0), 16000};
  const auto hf = frame_signal(ones, {64, 64, WindowType::hann});
  const auto hann = make_window(WindowType::hann, 64);
  for (std::size_t t = 0; t < 64; ++t) CHECK(hf(0, t) == hann[t]);

  CHECK_THROWS_AS(frame_signal(Waveform{std::vector<double>(10), 16000}, {400, 200}), vb::InputError);
  CHECK_THROWS_AS(frame_signal(w, {400, 0}), vb::ConfigError);
}

TEST_CASE("dft_forward known transforms") {
  const std::vector<double> impulse{1, 0, 0, 0};
  for (auto b : dft_forward(impulse)) CHECK(std::abs(b - cplx{1, 0}) < 1e-15);
  const auto c = dft_forward(std::vector<double>{1, 1, 1, 1});
  REQUIRE(c.size() == 3);
  CHECK(std::abs(c[0] - cplx{4, 0}) < 1e-15);
  CHECK(std::abs(c[1]) < 1e-15);
  CHECK(std::abs(c[2]) < 1e-15);
}

TEST_CASE("dft_forward agrees with direct summation for any length") {
  Rng rng(11);
  for (std::size_t n : {1u, 2u, 3u, 5u, 16u, 17u, 100u, 127u, 256u, 480u}) {
    const auto x = vbtest::random_vector(rng, n);
    const auto fast = dft_forward(x);
    const auto slow = dft_naive(x);
    double err = 0.0;
    for (std::size_t f = 0; f < fast.size(); ++f) err = std::max(err, std::abs(fast[f] - slow[f]));
    CHECK_MESSAGE(err < 1e-10, "n=" << n << " err=" << err);
  }
}

TEST_CASE("dft_inverse round trip, impulse and zero") {
  Rng rng(3);
  for (std::size_t n : {4u, 7u, 16u, 33u, 512u}) {
    const auto x = vbtest::random_vector(rng, n);
    CHECK(vbtest::max_abs_diff(dft_inverse(dft_forward(x), n), x) < 1e-10);
  }
  const auto imp = dft_inverse(std::vector<cplx>(5, cplx{1, 0}));
  REQUIRE(imp.size() == 8);
  CHECK(std::abs(imp[0] - 1.0) < 1e-15);
  for (std::size_t t = 1; t < 8; ++t) CHECK(std::abs(imp[t]) < 1e-15);
  for (double v : dft_inverse(std::vector<cplx>(9))) CHECK(v == 0.0);
}

TEST_CASE("DFT linearity and Parseval (randomised)") {
  Rng rng(5);
  std::uniform_int_distribution<std::size_t> len(2, 300);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = len(rng);
    const auto x = vbtest::random_vector(rng, n), y = vbtest::random_vector(rng, n);
    const double a = 0.7, b = -1.3;
    std::vector<double> z(n);
    for (std::size_t t = 0; t < n; ++t) z[t] = a * x[t] + b * y[t];
    const auto X = dft_forward(x), Y = dft_forward(y), Z = dft_forward(z);
    double lin = 0.0;
    for (std::size_t f = 0; f < Z.size(); ++f) lin = std::max(lin, std::abs(Z[f] - (a * X[f] + b * Y[f])));
    CHECK(lin < 1e-10);

    double et = 0.0, ef = 0.0;
    for (double v : x) et += v * v;
    for (std::size_t f = 0; f < X.size(); ++f) {
      const bool self_mirror = f == 0 || (n % 2 == 0 && f == n / 2);
      ef += (self_mirror ? 1.0 : 2.0) * std::norm(X[f]);
    }
    CHECK(std::abs(et - ef / n) < 1e-8);
  }
}

TEST_CASE("power_spectrum is a^2 + b^2") {
  ComplexSpectrum s(1, 1);
  s.at(0, 0) = {3, 4};
  CHECK(power_spectrum(s).values(0, 0) == 25.0);
  ComplexSpectrum z(3, 5);
  const auto zp = power_spectrum(z);
  for (double v : zp.values.values()) CHECK(v == 0.0);

  Rng rng(9);
  ComplexSpectrum r(4, 9);
  auto re = vbtest::random_vector(rng, 36, -5, 5), im = vbtest::random_vector(rng, 36, -5, 5);
  for (std::size_t i = 0; i < 36; ++i) r.data[i] = {re[i], im[i]};
  const auto p = power_spectrum(r);
  for (std::size_t i = 0; i < 36; ++i) {
    const double m = std::abs(r.data[i]);
    CHECK(std::abs(p.values.data()[i] - m * m) < 1e-12);
  }
}

TEST_CASE("stft/istft round trip on the interior for COLA configs") {
  const std::vector<FrameConfig> configs = {
      {256, 64, WindowType::hann}, {256, 128, WindowType::hann}, {512, 128, WindowType::hamming},
      {200, 100, WindowType::hamming}, {128, 128, WindowType::rectangular}, {128, 32, WindowType::rectangular}};
  Rng rng(1);
  for (const auto& cfg : configs) {
    REQUIRE(is_cola(cfg));
    Waveform w{vbtest::sine(4000, 440.0, 16000.0), 16000};
    auto noise = vbtest::random_vector(rng, 4000, -0.1, 0.1);
    for (std::size_t t = 0; t < 4000; ++t) w.samples[t] += noise[t];
    const auto back = istft(stft(w, cfg), cfg, 16000);
    double err = 0.0;
    for (std::size_t t = cfg.frame_length; t + cfg.frame_length < back.size(); ++t)
      err = std::max(err, std::abs(back.samples[t] - w.samples[t]));
    CHECK_MESSAGE(err < 1e-6, "frame " << cfg.frame_length << " hop " << cfg.hop);
  }
}

TEST_CASE("stft/istft zero and locality") {
  const FrameConfig cfg{256, 64, WindowType::hann};
  Waveform zero{std::vector<double>(2048, 0.0), 16000};
  const auto spec = stft(zero, cfg);
  for (auto v : spec.data) CHECK(v == cplx{});
  for (double v : istft(spec, cfg, 16000).samples) CHECK(v == 0.0);

  ComplexSpectrum one(spec.frames, spec.bins);
  const std::size_t k = 10;
  for (std::size_t f = 0; f < one.bins; ++f) one.at(k, f) = {1.0, 0.0};
  const auto out = istft(one, cfg, 16000);
  for (std::size_t t = 0; t < out.size(); ++t)
    if (t < k * cfg.hop || t >= k * cfg.hop + cfg.frame_length) CHECK(out.samples[t] == 0.0);
}

TEST_CASE("istft rejects non-COLA configs") {
  const FrameConfig bad{256, 256, WindowType::hann};
  CHECK_FALSE(is_cola(bad));
  CHECK_FALSE(is_cola({256, 100, WindowType::hann}));
  ComplexSpectrum s(2, 129);
  CHECK_THROWS_AS(istft(s, bad, 16000), vb::ConfigError);
}

TEST_CASE("parallel stft/istft match the serial reference bit for bit") {
  omp_set_num_threads(4);
  Rng rng(21);
  Waveform w{vbtest::random_vector(rng, 20000), 16000};
  const FrameConfig cfg{512, 128, WindowType::hann};
  const auto a = stft(w, cfg);
  const auto b = serial::stft(w, cfg);
  CHECK(a.data == b.data);
  CHECK(istft(a, cfg, 16000).samples == serial::istft(b, cfg, 16000).samples);
}

TEST_CASE("mu-law endpoints and zero") {
  CHECK(mu_law_level(0.0, 1024, 1023) == 512);
  CHECK(mu_law_level(1.0, 1024, 1023) == 1023);
  CHECK(mu_law_level(-1.0, 1024, 1023) == 0);
  CHECK(mu_law_level(2.5, 1024, 1023) == 1023);  // clipped
  QuantizedWave q{{0, 1024}, 1024, 1023, 16000};
  CHECK_THROWS_AS(mu_law_decode(q), vb::InputError);
}

TEST_CASE("mu-law exhaustive scan: monotone and within one step") {
  int prev = -1;
  for (int i = 0; i <= 10000; ++i) {
    const double x = -1.0 + 2.0 * i / 10000.0;
    const int level = mu_law_level(x, 1024, 1023);
    CHECK(level >= prev);
    prev = level;
    const auto [lo, hi] = mu_law_bin_edges(level, 1024, 1023);
    const double y = mu_law_value(level, 1024, 1023);
    CHECK(lo <= x);
    CHECK(x <= hi);
    CHECK(std::abs(y - x) <= hi - lo);
  }
}

TEST_CASE("one_hot") {
  const std::vector<int> c{0, 2, 1};
  const auto m = one_hot(c, 3);
  CHECK(m == vb::Matrix(3, 3, {1, 0, 0, 0, 0, 1, 0, 1, 0}));
  CHECK_THROWS_AS(one_hot(std::vector<int>{3}, 3), vb::InputError);
}

TEST_CASE("wav read/write") {
  const auto dir = std::filesystem::temp_directory_path() / "vb_test_wav";
  std::filesystem::create_directories(dir);
  Waveform w{vbtest::sine(1000, 300, 22050, 0.8), 22050};
  write_wav(dir / "a.wav", w, WavFormat::pcm16);
  const auto r16 = read_wav(dir / "a.wav");
  CHECK(r16.sample_rate == 22050);
  REQUIRE(r16.size() == 1000);
  CHECK(vbtest::max_abs_diff(r16.samples, w.samples) <= 0.5 / 32768.0 + 1e-12);

  write_wav(dir / "b.wav", w, WavFormat::float32);
  const auto rf = read_wav(dir / "b.wav");
  for (std::size_t i = 0; i < w.size(); ++i) CHECK(rf.samples[i] == static_cast<double>(static_cast<float>(w.samples[i])));

  auto bytes = encode_wav(w, WavFormat::pcm16);
  bytes.resize(bytes.size() - 100);
  CHECK_THROWS_AS(parse_wav(bytes), vb::IoError);
  auto stereo = encode_wav(w, WavFormat::pcm16);
  stereo[22] = 2;
  CHECK_THROWS_AS(parse_wav(stereo), vb::IoError);
  CHECK_THROWS_AS(read_wav(dir / "missing.wav"), vb::IoError);
}

TEST_CASE("resample_linear") {
  Waveform w{{0.0, 1.0, 2.0, 3.0, 4.0}, 4};
  const auto up = resample_linear(w, 8);
  CHECK(up.sample_rate == 8);
  REQUIRE(up.size() == 9);
  for (std::size_t i = 0; i < up.size(); ++i) CHECK(up.samples[i] == doctest::Approx(0.5 * i));
}
