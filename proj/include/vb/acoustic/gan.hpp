// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "json.hpp"
#include "vb/common/matrix.hpp"
#include "vb/nn/network.hpp"
#include "vb/nn/optimizer.hpp"

namespace vb::acoustic {

inline constexpr std::size_t kGanMgcDims = 60;
inline constexpr std::size_t kGanBapDims = 25;

/// Fixed input scaling of the discriminator: 0.001 on MGC 0-4, 0.01 on
/// MGC 5-9, 1 on the other MGC dims and 0 on BAP. Needs the 60 + 25 layout.
std::vector<double> gan_scale_weights();
Matrix gan_scale(const Matrix& features);

struct GanConfig {
  std::size_t channels = 64;
  std::size_t width = 5;           // conv kernel, frames
  double anchor_weight = 10.0;     // lambda on the L2 pull towards the input
  nn::OptimizerConfig generator_opt;
  nn::OptimizerConfig discriminator_opt;

  nlohmann::json to_json() const;
  static GanConfig from_json(const nlohmann::json& j);
};

struct GanLosses {
  double g_loss = 0.0;
  double d_loss = 0.0;
};

/// Generator: y_mgc = x_mgc + Linear(tanh-FF(Conv(x_mgc))); BAP copied.
/// Discriminator: Conv -> tanh-FF -> Linear to one logit per frame, fed
/// gan_scale(features). Both output layers start at zero, so the generator
/// starts as the identity and the discriminator at logit 0.
class GanPostfilter {
 public:
  GanPostfilter() = default;
  GanPostfilter(const GanConfig& cfg, std::uint64_t seed);

  Matrix apply(const Matrix& a_hat);
  /// One discriminator update followed by one generator update. Losses are
  /// per-frame means; d_loss is measured before the discriminator update and
  /// g_loss before the generator update.
  GanLosses train_step(const Matrix& real, const Matrix& a_hat);

  /// Discriminator loss (mean BCE of real and generated frames, averaged)
  /// without updating anything.
  double discriminator_loss(const Matrix& real, const Matrix& fake);

  const GanConfig& config() const noexcept { return cfg_; }
  nn::Network& generator() { return gen_; }
  nn::Network& discriminator() { return disc_; }
  nn::ParamList params();
  nlohmann::json arch_json() const;
  static GanPostfilter from_arch_json(const nlohmann::json& j);

 private:
  Matrix generate_mgc_delta(const Matrix& mgc);
  GanConfig cfg_;
  nn::Network gen_, disc_;
  std::unique_ptr<nn::Optimizer> gopt_, dopt_;
};

Matrix gan_apply(GanPostfilter& pf, const Matrix& a_hat);
GanLosses gan_train_step(GanPostfilter& pf, const Matrix& real, const Matrix& a_hat);

}  // namespace vb::acoustic
