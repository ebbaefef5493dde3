// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>

#include "json.hpp"
#include "vb/common/matrix.hpp"
#include "vb/features/f0.hpp"
#include "vb/nn/network.hpp"
#include "vb/nn/optimizer.hpp"

namespace vb::acoustic {

struct F0ModelConfig {
  std::size_t ff_size = 64;
  std::size_t bi_size = 32;
  std::size_t head_size = 64;
  nn::OptimizerConfig opt;

  nlohmann::json to_json() const;
  static F0ModelConfig from_json(const nlohmann::json& j);
};

/// Autoregressive classifier over the 256 quantised-F0 classes. A context
/// network (tanh FF + bi-LSTM) reads the linguistic features once; a small
/// head reads [context_n | one_hot(q_{n-1})] and emits log-probabilities.
/// q_{-1} is the unvoiced class.
class F0Model {
 public:
  F0Model() = default;
  F0Model(std::size_t ling_dim, const F0ModelConfig& cfg, std::uint64_t seed);

  /// Teacher-forced log-probabilities, N x 256.
  Matrix log_probs(const Matrix& l, const features::QuantizedF0& q);
  /// One optimiser step on one utterance; returns mean per-frame cross-entropy.
  double train_step(const Matrix& l, const features::QuantizedF0& q);
  double teacher_forced_accuracy(const Matrix& l, const features::QuantizedF0& q);
  /// Per-frame argmax with the generated level fed back; ties go to the
  /// lower class.
  features::QuantizedF0 generate(const Matrix& l);

  std::size_t input_dim() const { return context_.input_dim(); }
  nn::ParamList params();
  nlohmann::json arch_json() const;
  static F0Model from_arch_json(const nlohmann::json& j);

 private:
  Matrix head_input(const Matrix& ctx, const features::QuantizedF0& q) const;
  F0ModelConfig cfg_;
  nn::Network context_, head_;
  std::unique_ptr<nn::Optimizer> opt_;
};

double f0_model_train(F0Model& m, const Matrix& l, const features::QuantizedF0& q);
features::QuantizedF0 f0_model_generate(F0Model& m, const Matrix& l);

}  // namespace vb::acoustic
