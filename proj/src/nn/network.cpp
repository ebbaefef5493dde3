// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#include "vb/nn/network.hpp"

#include <string>

#include "vb/common/error.hpp"

namespace vb::nn {

Network::Network(const std::vector<LayerSpec>& specs) {
  for (const auto& s : specs) add(s);
}

void Network::add(const LayerSpec& spec) {
  if (!layers_.empty() && layers_.back()->output_dim() != spec.in)
    throw ShapeError(to_string(spec.kind), "input size " + std::to_string(spec.in) +
                                               " does not match previous output " +
                                               std::to_string(layers_.back()->output_dim()));
  layers_.push_back(make_layer(spec));
}

std::size_t Network::input_dim() const { return layers_.empty() ? 0 : layers_.front()->input_dim(); }
std::size_t Network::output_dim() const { return layers_.empty() ? 0 : layers_.back()->output_dim(); }

void Network::init(std::uint64_t seed) {
  Rng rng(seed);
  for (auto& l : layers_) l->init(rng);
}

Matrix Network::forward(const Matrix& x) {
  if (layers_.empty()) throw ConfigError("network has no layers");
  Matrix h = layers_.front()->forward(x);
  for (std::size_t i = 1; i < layers_.size(); ++i) h = layers_[i]->forward(h);
  return h;
}

Matrix Network::backward(const Matrix& dy) {
  if (layers_.empty()) throw ConfigError("network has no layers");
  Matrix g = layers_.back()->backward(dy);
  for (std::size_t i = layers_.size() - 1; i-- > 0;) g = layers_[i]->backward(g);
  return g;
}

ParamList Network::params() {
  ParamList out;
  for (auto& l : layers_)
    for (Tensor* p : l->params()) out.push_back(p);
  return out;
}

std::vector<LayerSpec> Network::specs() const {
  std::vector<LayerSpec> out;
  for (const auto& l : layers_) out.push_back(l->spec());
  return out;
}

nlohmann::json Network::arch_json() const {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& l : layers_) layers.push_back(l->spec().to_json());
  return layers;
}

Network Network::from_arch_json(const nlohmann::json& j) {
  Network net;
  for (const auto& l : j) net.add(LayerSpec::from_json(l));
  return net;
}

}  // namespace vb::nn
