// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "test_util.hpp"
#include "vb/common/error.hpp"
#include "vb/features/extract.hpp"
#include "vb/vocoder/griffin_lim.hpp"
#include "vb/vocoder/source_filter.hpp"

using namespace vb;
using namespace vb::vocoder;

namespace {

features::F0Track constant_f0(std::size_t frames, double hz) {
  features::F0Track t;
  t.f0.assign(frames, hz);
  return t;
}

features::BandAperiodicity constant_bap(std::size_t frames, double v, std::size_t bands = 25) {
  return {Matrix(frames, bands, v)};
}

double mean_power(const std::vector<double>& x, std::size_t from, std::size_t to) {
  double s = 0.0;
  for (std::size_t t = from; t < to; ++t) s += x[t] * x[t];
  return s / static_cast<double>(to - from);
}

double autocorrelation(const std::vector<double>& x, std::size_t lag, std::size_t from, std::size_t to) {
  double num = 0.0, e0 = 0.0, e1 = 0.0;
  for (std::size_t t = from; t + lag < to; ++t) {
    num += x[t] * x[t + lag];
    e0 += x[t] * x[t];
    e1 += x[t + lag] * x[t + lag];
  }
  return num / std::sqrt(e0 * e1);
}

signal::Waveform synthetic_vowel(std::size_t n, double sr, double vibrato = 0.0, double noise = 0.0) {
  return {vbtest::formant_vowel(n, sr, 120.0, vibrato, noise), static_cast<int>(sr)};
}

double db(double x) { return 10.0 * std::log10(x); }

}  // namespace

TEST_CASE("synthesis config follows the frame rate") {
  SynthesisConfig c;
  CHECK(c.hop() == 80);
  CHECK(c.analysis_length() == 1024);
  CHECK(c.frames().frame_length == 1040);
  CHECK(c.offset() == -8);
  CHECK(signal::is_cola(c.frames()));
  CHECK(c.bins() == 521);
  CHECK(c.length_for(3) == 2 * 80 + 1024);
  c.sample_rate = 48000;
  CHECK(c.hop() == 240);
  CHECK(c.analysis_length() == 2048);
  CHECK(c.frames().frame_length == 2160);
  c.sample_rate = 16010;
  CHECK_THROWS_AS(c.frames(), ConfigError);
  CHECK(SynthesisConfig::from_json(SynthesisConfig{}.to_json()).to_json() == SynthesisConfig{}.to_json());
}

TEST_CASE("pulse train is phase continuous at fractional periods") {
  SynthesisConfig cfg;
  const double f0 = 123.4;
  const auto p = pulse_train(constant_f0(200, f0), cfg.length_for(200), cfg);
  const std::size_t n = p.size();
  // unit long-term power like unit white noise
  CHECK(mean_power(p.samples, 2000, n - 2000) == doctest::Approx(1.0).epsilon(0.02));
  // pulse count over the whole signal
  std::size_t peaks = 0;
  for (std::size_t t = 1; t + 1 < n; ++t)
    if (p.samples[t] > 0.5 * std::sqrt(16000 / f0) && p.samples[t] >= p.samples[t - 1] && p.samples[t] > p.samples[t + 1])
      ++peaks;
  const double expected = f0 * static_cast<double>(n) / 16000.0;
  CHECK(std::abs(static_cast<double>(peaks) - expected) <= 1.0);

  auto track = constant_f0(200, f0);
  for (std::size_t i = 100; i < 200; ++i) track.f0[i] = 0.0;
  const auto half = pulse_train(track, cfg.length_for(200), cfg);
  CHECK(mean_power(half.samples, cfg.length_for(160), n) == 0.0);
}

TEST_CASE("mixed excitation blends pulse and noise") {
  SynthesisConfig cfg;
  const std::size_t N = 300;
  const double f0 = 200.0;
  const auto fc = cfg.frames();

  SUBCASE("bap 0 gives harmonic peaks") {
    const auto e = mixed_excitation(constant_f0(N, f0), constant_bap(N, 0.0), cfg);
    const auto spec = signal::power_spectrum(signal::stft(e, fc));
    const double bin_hz = 16000.0 / fc.frame_length;
    for (std::size_t n = 20; n < N - 20; n += 37)
      for (int k = 1; k <= 20; ++k) {
        const auto peak = static_cast<std::size_t>(std::lround(k * f0 / bin_hz));
        const auto trough = static_cast<std::size_t>(std::lround((k + 0.5) * f0 / bin_hz));
        CHECK(db(spec.values(n, peak) / spec.values(n, trough)) > 20.0);
      }
  }
  SUBCASE("bap 1 is noise") {
    const auto e = mixed_excitation(constant_f0(N, f0), constant_bap(N, 1.0), cfg);
    CHECK(std::abs(autocorrelation(e.samples, 80, 1000, e.size() - 1000)) < 0.3);
    CHECK(mean_power(e.samples, 1000, e.size() - 1000) == doctest::Approx(1.0).epsilon(0.1));
  }
  SUBCASE("energy is preserved by the square-root blend") {
    for (double a : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      const auto e = mixed_excitation(constant_f0(N, f0), constant_bap(N, a), cfg);
      CHECK(mean_power(e.samples, 1000, e.size() - 1000) == doctest::Approx(1.0).epsilon(0.1));
    }
  }
  SUBCASE("per-bin blend matches the separate components") {
    Rng rng(3);
    features::BandAperiodicity bap{vbtest::random_matrix(rng, N, 25, 0.0, 1.0)};
    const auto mixed = excitation_spectrum(constant_f0(N, f0), bap, cfg);
    const std::size_t ulen = (N - 1) * fc.hop + fc.frame_length;
    const auto pulses = signal::stft(pulse_train(constant_f0(N, f0), ulen, cfg), fc);
    const auto noise = signal::stft(excitation_noise(ulen, cfg), fc);
    const auto band = features::band_of_bins(mixed.bins, 25);
    double worst = 0.0;
    for (std::size_t n = 0; n < N; n += 13)
      for (std::size_t f = 0; f < mixed.bins; ++f) {
        const double a = bap.values(n, band[f]);
        const double wp = std::sqrt(1 - a), wn = std::sqrt(a);
        CHECK(wp * wp + wn * wn == doctest::Approx(1.0).epsilon(1e-15));
        worst = std::max(worst, std::abs(mixed.at(n, f) - (wp * pulses.at(n, f) + wn * noise.at(n, f))));
      }
    CHECK(worst < 1e-9);
  }
  SUBCASE("unvoiced frames ignore BAP") {
    Rng rng(4);
    features::BandAperiodicity bap{vbtest::random_matrix(rng, N, 25, 0.0, 1.0)};
    const auto a = mixed_excitation(constant_f0(N, 0.0), bap, cfg);
    const auto b = mixed_excitation(constant_f0(N, 0.0), constant_bap(N, 1.0), cfg);
    CHECK(a.samples == b.samples);
    const auto c = mixed_excitation(constant_f0(N, f0), constant_bap(N, 1.0), cfg);
    CHECK(vbtest::max_abs_diff(a.samples, c.samples) < 1e-12);
  }
  SUBCASE("noise seed") {
    SynthesisConfig other = cfg;
    other.noise_seed = 1;
    const auto a = mixed_excitation(constant_f0(50, 0.0), constant_bap(50, 1.0), cfg);
    const auto b = mixed_excitation(constant_f0(50, 0.0), constant_bap(50, 1.0), other);
    const auto c = mixed_excitation(constant_f0(50, 0.0), constant_bap(50, 1.0), cfg);
    CHECK(a.samples != b.samples);
    CHECK(a.samples == c.samples);
  }
  CHECK_THROWS_AS(mixed_excitation(constant_f0(5, f0), constant_bap(4, 0.0), cfg), ShapeError);
}

TEST_CASE("source-filter synthesis") {
  SynthesisConfig cfg;
  const std::size_t N = 120;
  const auto f0 = constant_f0(N, 150.0);
  const auto bap = constant_bap(N, 0.2);

  SUBCASE("flat envelope is the identity filter") {
    features::Cepstra flat{Matrix(N, 60), 0.55};
    const auto y = source_filter_synthesize(flat, f0, bap, cfg);
    const auto e = mixed_excitation(f0, bap, cfg);
    CHECK(y.size() == cfg.length_for(N));
    CHECK(vbtest::max_abs_diff(y.samples, e.samples) < 1e-9);
  }
  SUBCASE("linear in excitation gain") {
    Rng rng(5);
    features::Cepstra c{vbtest::random_matrix(rng, N, 30, -0.2, 0.2), 0.55};
    const auto y1 = source_filter_synthesize(c, f0, bap, cfg);
    const double alpha = 3.7;
    for (std::size_t n = 0; n < N; ++n) c.coeffs(n, 0) += std::log(alpha);
    const auto y2 = source_filter_synthesize(c, f0, bap, cfg);
    double worst = 0.0, peak = 0.0;
    for (std::size_t t = 0; t < y1.size(); ++t) {
      worst = std::max(worst, std::abs(y2.samples[t] - alpha * y1.samples[t]));
      peak = std::max(peak, std::abs(alpha * y1.samples[t]));
    }
    CHECK(worst <= 1e-8 * peak);
  }
  SUBCASE("silence in, silence out") {
    features::ExtractionConfig ec;
    const auto feats = features::analyze({std::vector<double>(16000, 0.0), 16000}, ec);
    const auto y = source_filter_synthesize(feats.mgc, feats.f0, feats.bap, cfg);
    double peak = 0.0;
    for (double v : y.samples) peak = std::max(peak, std::abs(v));
    CHECK(peak < 1e-6);
  }
  SUBCASE("vowel analysis-synthesis keeps the envelope") {
    const auto vowel = synthetic_vowel(16000, 16000.0);
    features::ExtractionConfig ec;
    const auto a = features::analyze(vowel, ec);
    const auto y = source_filter_synthesize(a.mgc, a.f0, a.bap, cfg);
    const auto b = features::analyze(y, ec);
    REQUIRE(b.frames() == a.frames());
    const auto ea = features::cepstra_to_amplitude(a.mgc, 513);
    const auto eb = features::cepstra_to_amplitude(b.mgc, 513);
    double total = 0.0;
    std::size_t count = 0;
    for (std::size_t n = 10; n + 10 < a.frames(); ++n) {
      if (a.f0.f0[n] <= 0.0) continue;
      double s = 0.0;
      for (std::size_t f = 0; f < 513; ++f) {
        const double d = 20.0 * std::log10(ea(n, f) / eb(n, f));
        s += d * d;
      }
      total += std::sqrt(s / 513.0);
      ++count;
    }
    REQUIRE(count > 100);
    const double lsd = total / static_cast<double>(count);
    MESSAGE("envelope LSD " << lsd << " dB");
    CHECK(lsd < 3.0);
  }
}

TEST_CASE("griffin-lim") {
  GriffinLimConfig glc;
  const auto& fc = glc.stft;
  const auto x = synthetic_vowel(16000 - ((16000 - 1024) % 512), 16000.0, 0.05, 0.05);
  const auto spec = signal::stft(x, fc);
  const Matrix target = signal::magnitude(spec);

  SUBCASE("zero iterations return the initial reconstruction") {
    glc.iterations = 0;
    for (auto init : {InitPhase::zero, InitPhase::random, InitPhase::minimum}) {
      glc.init_phase = init;
      const auto r = griffin_lim(target, glc);
      CHECK(r.errors.size() == 1);
      signal::ComplexSpectrum s0(target.rows(), target.cols());
      if (init == InitPhase::zero)
        for (std::size_t i = 0; i < s0.data.size(); ++i) s0.data[i] = target.values()[i];
      if (init == InitPhase::minimum) s0 = features::minimum_phase_spectrum(target);
      if (init != InitPhase::random) {
        const auto ref = signal::istft(s0, fc, 16000);
        CHECK(r.wave.samples == ref.samples);
      }
    }
  }
  SUBCASE("consistent amplitudes converge") {
    for (auto init : {InitPhase::zero, InitPhase::random, InitPhase::minimum}) {
      glc.init_phase = init;
      const auto r = griffin_lim(target, glc);
      REQUIRE(r.errors.size() == 61);
      MESSAGE(to_string(init) << " E_0 " << r.errors.front() << " E_60 " << r.errors.back());
      CHECK(r.errors.back() < 0.1);
      for (std::size_t i = 1; i < r.errors.size(); ++i) CHECK(r.errors[i] <= r.errors[i - 1] + 1e-7);
    }
  }
  SUBCASE("error is non-increasing for random amplitudes") {
    glc.stft = {256, 64, signal::WindowType::hann};
    glc.iterations = 40;
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      Rng rng(seed);
      const Matrix a = vbtest::random_matrix(rng, 40, 129, 0.0, 2.0);
      for (auto init : {InitPhase::zero, InitPhase::random, InitPhase::minimum}) {
        glc.init_phase = init;
        glc.seed = seed;
        const auto r = griffin_lim(a, glc);
        for (std::size_t i = 1; i < r.errors.size(); ++i) CHECK(r.errors[i] <= r.errors[i - 1] + 1e-7);
      }
    }
  }
  SUBCASE("consistent spectrograms are fixed points") {
    glc.init_phase = InitPhase::input;
    glc.iterations = 5;
    const auto r = griffin_lim(target, glc, &spec);
    for (double e : r.errors) CHECK(e < 1e-10);
    CHECK_THROWS_AS(griffin_lim(target, glc), ConfigError);
  }
  SUBCASE("tolerance stops early") {
    glc.tolerance = 0.5;
    const auto r = griffin_lim(target, glc);
    CHECK(r.errors.back() < 0.5);
    CHECK(r.errors.size() < 61);
  }
  SUBCASE("bad configs and inputs") {
    glc.stft = {1024, 300, signal::WindowType::hann};
    CHECK_THROWS_AS(griffin_lim(target, glc), ConfigError);
    glc.stft = {1024, 512, signal::WindowType::hann};
    CHECK_THROWS_AS(griffin_lim(Matrix(4, 100), glc), ShapeError);
    Matrix neg(4, 513, 1.0);
    neg(1, 1) = -1.0;
    CHECK_THROWS_AS(griffin_lim(neg, glc), InputError);
    CHECK(GriffinLimConfig::from_json(glc.to_json()).to_json() == glc.to_json());
  }
}

TEST_CASE("phase recovery enhancement") {
  GriffinLimConfig glc;
  SUBCASE("own phase is a fixed point") {
    glc.init_phase = InitPhase::input;
    const auto x = synthetic_vowel(12345, 16000.0);
    const auto r = phase_recovery_enhance(x, glc);
    CHECK(r.errors.front() < 1e-10);
    CHECK(r.wave.size() == x.size());
    CHECK(vbtest::max_abs_diff(r.wave.samples, x.samples) < 1e-9);
  }
  SUBCASE("zero signal") {
    const auto r = phase_recovery_enhance({std::vector<double>(5000, 0.0), 16000}, glc);
    CHECK(r.wave.size() == 5000);
    for (double v : r.wave.samples) CHECK(v == 0.0);
  }
  SUBCASE("vocoded input gets new phase with the same magnitude") {
    SynthesisConfig cfg;
    const std::size_t N = 200;
    Rng rng(8);
    features::Cepstra c{vbtest::random_matrix(rng, N, 20, -0.3, 0.3), 0.55};
    const auto y = source_filter_synthesize(c, constant_f0(N, 130.0), constant_bap(N, 0.1), cfg);
    glc.init_phase = InitPhase::zero;
    const auto r = phase_recovery_enhance(y, glc);
    MESSAGE("E_0 " << r.errors.front() << " E_final " << r.errors.back());
    CHECK(r.errors.back() < 0.1);
    CHECK(vbtest::max_abs_diff(r.wave.samples, y.samples) > 0.1);
  }
}
