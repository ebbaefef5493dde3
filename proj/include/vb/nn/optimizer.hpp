// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "vb/nn/tensor.hpp"

namespace vb::nn {

enum class OptimizerKind { sgd, adam };

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::sgd;
  double learning_rate = 0.01;
  double momentum = 0.9;
  double clip_norm = 5.0;  // global gradient norm; <= 0 disables
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  void validate() const;
  nlohmann::json to_json() const;
  static OptimizerConfig from_json(const nlohmann::json& j);
};

/// Per-parameter accumulators for one parameter list. The list must keep
/// its order and shapes for the optimizer's lifetime.
class Optimizer {
 public:
  explicit Optimizer(OptimizerConfig cfg) : cfg_(cfg) { cfg_.validate(); }

  /// Clips the global gradient norm, then updates every value in place.
  /// Returns the gradient norm before clipping.
  double step(const ParamList& params);

  const OptimizerConfig& config() const noexcept { return cfg_; }
  std::size_t steps() const noexcept { return t_; }

 private:
  OptimizerConfig cfg_;
  std::vector<std::vector<double>> m_, v_;
  std::size_t t_ = 0;
};

}  // namespace vb::nn
