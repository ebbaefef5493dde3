// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#include "vb/signal/fft.hpp"

#include <cmath>
#include <numbers>
#include <unordered_map>

#include "vb/common/error.hpp"

namespace vb::signal {

struct Fft::Bluestein {
  std::size_t m = 0;               // power-of-two convolution length
  std::vector<cplx> chirp;         // exp(-i pi k^2 / n), k < n
  std::vector<cplx> kernel_fft;    // FFT of the conjugate chirp, length m
  std::unique_ptr<Fft> conv;
};

std::size_t next_power_of_two(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

Fft::Fft(std::size_t n) : n_(n) {
  if (n == 0) throw InputError("Fft: length must be positive");
  if (is_power_of_two(n)) {
    twiddle_.resize(n / 2);
    for (std::size_t j = 0; j < n / 2; ++j) {
      const double ang = -2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
      twiddle_[j] = {std::cos(ang), std::sin(ang)};
    }
    bitrev_.resize(n);
    std::size_t bits = 0;
    while ((std::size_t{1} << bits) < n) ++bits;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t r = 0;
      for (std::size_t b = 0; b < bits; ++b)
        if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (bits - 1 - b);
      bitrev_[i] = r;
    }
    return;
  }

  auto bs = std::make_unique<Bluestein>();
  bs->m = next_power_of_two(2 * n - 1);
  bs->chirp.resize(n);
  const std::size_t two_n = 2 * n;
  for (std::size_t k = 0; k < n; ++k) {
    // k^2 mod 2n keeps the angle small and exact.
    const std::size_t q = static_cast<std::size_t>((static_cast<unsigned __int128>(k) * k) % two_n);
    const double ang = -std::numbers::pi * static_cast<double>(q) / static_cast<double>(n);
    bs->chirp[k] = {std::cos(ang), std::sin(ang)};
  }
  bs->conv = std::make_unique<Fft>(bs->m);
  bs->kernel_fft.assign(bs->m, cplx{});
  bs->kernel_fft[0] = std::conj(bs->chirp[0]);
  for (std::size_t k = 1; k < n; ++k) {
    bs->kernel_fft[k] = std::conj(bs->chirp[k]);
    bs->kernel_fft[bs->m - k] = std::conj(bs->chirp[k]);
  }
  bs->conv->forward(bs->kernel_fft);
  bluestein_ = std::move(bs);
}

Fft::~Fft() = default;
Fft::Fft(Fft&&) noexcept = default;
Fft& Fft::operator=(Fft&&) noexcept = default;

void Fft::radix2(std::span<cplx> a, bool inverse) const {
  const std::size_t n = n_;
  for (std::size_t i = 0; i < n; ++i)
    if (i < bitrev_[i]) std::swap(a[i], a[bitrev_[i]]);
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t stride = n / len;
    for (std::size_t start = 0; start < n; start += len) {
      for (std::size_t j = 0; j < half; ++j) {
        cplx w = twiddle_[j * stride];
        if (inverse) w = std::conj(w);
        const cplx u = a[start + j];
        const cplx v = a[start + j + half] * w;
        a[start + j] = u + v;
        a[start + j + half] = u - v;
      }
    }
  }
}

void Fft::transform(std::span<cplx> data, bool inverse) const {
  if (data.size() != n_) throw InputError("Fft: buffer length does not match plan");
  if (!bluestein_) {
    radix2(data, inverse);
    return;
  }
  // X[f] = conj(c_f) * sum_t (x_t c_t) conj(c_{f-t}) with c_k = exp(-i pi k^2/n)
  // for the forward direction; the inverse is the conjugate transform.
  const auto& bs = *bluestein_;
  std::vector<cplx> buf(bs.m, cplx{});
  for (std::size_t k = 0; k < n_; ++k) {
    const cplx x = inverse ? std::conj(data[k]) : data[k];
    buf[k] = x * bs.chirp[k];
  }
  bs.conv->forward(buf);
  for (std::size_t k = 0; k < bs.m; ++k) buf[k] *= bs.kernel_fft[k];
  bs.conv->inverse(buf);
  for (std::size_t k = 0; k < n_; ++k) {
    const cplx y = buf[k] * bs.chirp[k];
    data[k] = inverse ? std::conj(y) : y;
  }
}

void Fft::forward(std::span<cplx> data) const { transform(data, false); }

void Fft::inverse(std::span<cplx> data) const {
  transform(data, true);
  const double scale = 1.0 / static_cast<double>(n_);
  for (auto& v : data) v *= scale;
}

const Fft& fft_plan(std::size_t n) {
  thread_local std::unordered_map<std::size_t, std::unique_ptr<Fft>> cache;
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<Fft>(n);
  return *slot;
}

std::vector<cplx> dft_forward(std::span<const double> frame) {
  const std::size_t n = frame.size();
  if (n == 0) throw InputError("dft_forward: empty frame");
  std::vector<cplx> buf(frame.begin(), frame.end());
  fft_plan(n).forward(buf);
  buf.resize(n / 2 + 1);
  return buf;
}

std::vector<double> dft_inverse(std::span<const cplx> bins, std::size_t n) {
  if (bins.empty()) throw InputError("dft_inverse: no bins");
  if (n == 0) n = 2 * (bins.size() - 1);
  if (n == 0) n = 1;
  if (n / 2 + 1 != bins.size()) throw InputError("dft_inverse: bin count does not match length");
  std::vector<cplx> full(n);
  full[0] = {bins[0].real(), 0.0};
  for (std::size_t f = 1; f < bins.size(); ++f) {
    full[f] = bins[f];
    if (n - f != f) full[n - f] = std::conj(bins[f]);
  }
  if (n % 2 == 0 && n > 1) full[n / 2] = {bins[n / 2].real(), 0.0};
  fft_plan(n).inverse(full);
  std::vector<double> out(n);
  for (std::size_t t = 0; t < n; ++t) out[t] = full[t].real();
  return out;
}

std::vector<cplx> dft_naive(std::span<const double> frame) {
  const std::size_t n = frame.size();
  std::vector<cplx> out(n / 2 + 1);
  for (std::size_t f = 0; f < out.size(); ++f) {
    cplx s{};
    for (std::size_t t = 0; t < n; ++t) {
      const std::size_t q = (f * t) % n;
      const double ang = -2.0 * std::numbers::pi * static_cast<double>(q) / static_cast<double>(n);
      s += frame[t] * cplx{std::cos(ang), std::sin(ang)};
    }
    out[f] = s;
  }
  return out;
}

}  // namespace vb::signal
