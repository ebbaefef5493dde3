// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "json.hpp"
#include "vb/acoustic/models.hpp"
#include "vb/acoustic/standardizer.hpp"
#include "vb/nn/optimizer.hpp"

namespace vb::acoustic {

enum class AcousticKind { rnn, sar };

struct AcousticTrainConfig {
  AcousticKind kind = AcousticKind::sar;
  AcousticNetConfig net;
  nn::OptimizerConfig opt;
  std::size_t steps = 500;
  std::uint64_t seed = 1;
  std::size_t mgc_dims = 60;
  std::size_t bap_dims = 25;

  nlohmann::json to_json() const;
  static AcousticTrainConfig from_json(const nlohmann::json& j);
};

struct TrainingPair {
  Matrix l;  // N x D linguistic features
  Matrix a;  // N x (mgc + bap) acoustic features
};

/// A trained RNN or SAR model together with its input/output normalisers.
/// Training and the SAR recursion run on z-normalised features; generate()
/// returns features in their original units.
class AcousticModel {
 public:
  AcousticModel() = default;
  AcousticModel(std::size_t ling_dim, const AcousticTrainConfig& cfg);

  /// Fits the normalisers on `data` and trains for cfg.steps single-utterance
  /// steps, visiting utterances in a seeded shuffled order each epoch.
  /// Returns the per-frame loss of every step.
  std::vector<double> train(const std::vector<TrainingPair>& data,
                            const std::function<void(std::size_t, double)>& on_step = {});
  Matrix generate(const Matrix& l);

  AcousticKind kind() const noexcept { return cfg_.kind; }
  const AcousticTrainConfig& config() const noexcept { return cfg_; }
  nn::Network& network() { return net_; }
  SarParameters& sar() { return sar_; }

  nn::ParamList params();
  nlohmann::json arch_json() const;
  void save(const std::filesystem::path& path);
  static AcousticModel load(const std::filesystem::path& path);

 private:
  AcousticTrainConfig cfg_;
  nn::Network net_;
  SarParameters sar_;
  Standardizer in_norm_, out_norm_;
};

}  // namespace vb::acoustic
