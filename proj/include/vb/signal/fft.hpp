// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace vb::signal {

using cplx = std::complex<double>;

/// Complex DFT plan of any length. Powers of two use an iterative radix-2
/// transform; other lengths go through Bluestein's chirp-z algorithm on a
/// power-of-two convolution. Plans are immutable after construction and can
/// be shared between threads.
class Fft {
 public:
  explicit Fft(std::size_t n);
  ~Fft();
  Fft(Fft&&) noexcept;
  Fft& operator=(Fft&&) noexcept;

  std::size_t size() const noexcept { return n_; }

  /// X[f] = sum_t x[t] exp(-i 2 pi f t / n), in place.
  void forward(std::span<cplx> data) const;
  /// x[t] = (1/n) sum_f X[f] exp(+i 2 pi f t / n), in place.
  void inverse(std::span<cplx> data) const;

 private:
  struct Bluestein;
  void radix2(std::span<cplx> data, bool inverse) const;
  void transform(std::span<cplx> data, bool inverse) const;

  std::size_t n_;
  std::vector<cplx> twiddle_;  // exp(-i 2 pi j / n), j < n/2 (radix-2 only)
  std::vector<std::size_t> bitrev_;
  std::unique_ptr<Bluestein> bluestein_;
};

/// Shared plan for length n from a thread-local cache.
const Fft& fft_plan(std::size_t n);

/// One-sided DFT of a real frame: bins f = 0 .. n/2.
std::vector<cplx> dft_forward(std::span<const double> frame);

/// Real inverse of one-sided bins. `n` is the time-domain length; 0 means
/// 2 * (bins - 1). Imaginary parts of DC (and Nyquist for even n) are ignored.
std::vector<double> dft_inverse(std::span<const cplx> bins, std::size_t n = 0);

/// Direct O(n^2) summation; slow reference used by tests and benchmarks.
std::vector<cplx> dft_naive(std::span<const double> frame);

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }
std::size_t next_power_of_two(std::size_t n);

}  // namespace vb::signal
