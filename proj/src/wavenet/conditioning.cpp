// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#include "vb/wavenet/conditioning.hpp"

#include <cmath>
#include <string>

#include "vb/common/error.hpp"

namespace vb::wavenet {

std::vector<bool> ConditioningTrack::voiced_flags() const {
  std::vector<bool> v(samples());
  for (std::size_t t = 0; t < v.size(); ++t) v[t] = qf0[t / factor] != 0;
  return v;
}

Matrix ConditioningTrack::expand() const {
  const std::size_t M = mgc.cols();
  Matrix out(samples(), M + 1);
  for (std::size_t t = 0; t < out.rows(); ++t) {
    const std::size_t n = t / factor;
    auto src = mgc.row(n);
    auto dst = out.row(t);
    std::copy(src.begin(), src.end(), dst.begin());
    dst[M] = qf0[n];
  }
  return out;
}

ConditioningTrack ConditioningTrack::slice(std::size_t first, std::size_t count) const {
  if (first + count > frames()) throw ShapeError("conditioning", "slice past the last frame");
  ConditioningTrack out;
  out.factor = factor;
  out.qf0.assign(qf0.begin() + static_cast<long>(first), qf0.begin() + static_cast<long>(first + count));
  out.mgc = Matrix(count, mgc.cols());
  std::copy_n(mgc.data() + first * mgc.cols(), count * mgc.cols(), out.mgc.data());
  return out;
}

void ConditioningTrack::validate() const {
  if (factor == 0) throw ConfigError("conditioning: upsampling factor must be positive");
  if (mgc.rows() != qf0.size())
    throw ShapeError("conditioning", std::to_string(mgc.rows()) + " MGC frames vs " +
                                         std::to_string(qf0.size()) + " F0 frames");
}

ConditioningTrack upsample_conditioning(const features::AcousticFrameSequence& features, int sample_rate) {
  features.validate();
  const double rate = features.f0.frame_rate;
  const double ratio = sample_rate / rate;
  const double rounded = std::round(ratio);
  if (rate <= 0 || sample_rate <= 0 || rounded < 1 || std::abs(ratio - rounded) > 1e-9)
    throw ConfigError("upsample_conditioning: sample rate " + std::to_string(sample_rate) +
                      " is not an integer multiple of frame rate " + std::to_string(rate));
  ConditioningTrack c;
  c.mgc = features.mgc.coeffs;
  c.qf0 = features.qf0.levels;
  c.factor = static_cast<std::size_t>(rounded);
  return c;
}

ConditioningTrack constant_conditioning(std::size_t frames, std::size_t mgc_dims, int qf0_level,
                                        std::size_t factor) {
  ConditioningTrack c;
  c.mgc = Matrix(frames, mgc_dims);
  c.qf0.assign(frames, qf0_level);
  c.factor = factor;
  return c;
}

}  // namespace vb::wavenet
