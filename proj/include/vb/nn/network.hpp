// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <vector>

#include "json.hpp"
#include "vb/nn/layers.hpp"

namespace vb::nn {

/// A stack of layers applied in order.
class Network {
 public:
  Network() = default;
  explicit Network(const std::vector<LayerSpec>& specs);

  void add(const LayerSpec& spec);
  std::size_t size() const noexcept { return layers_.size(); }
  Layer& layer(std::size_t i) { return *layers_.at(i); }
  const Layer& layer(std::size_t i) const { return *layers_.at(i); }

  std::size_t input_dim() const;
  std::size_t output_dim() const;

  void init(std::uint64_t seed);
  Matrix forward(const Matrix& x);
  Matrix backward(const Matrix& dy);

  ParamList params();
  std::vector<LayerSpec> specs() const;
  nlohmann::json arch_json() const;
  static Network from_arch_json(const nlohmann::json& j);

 private:
  std::vector<std::unique_ptr<Layer>> layers_;
};

}  // namespace vb::nn
