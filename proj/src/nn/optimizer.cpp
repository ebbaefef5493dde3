// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#include "vb/nn/optimizer.hpp"

#include <cmath>

#include "vb/common/error.hpp"

namespace vb::nn {

void OptimizerConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("optimizer: learning_rate must be positive");
  if (momentum < 0.0 || momentum >= 1.0) throw ConfigError("optimizer: momentum must be in [0, 1)");
  if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0)
    throw ConfigError("optimizer: adam betas must be in [0, 1)");
  if (!(epsilon > 0.0)) throw ConfigError("optimizer: epsilon must be positive");
}

nlohmann::json OptimizerConfig::to_json() const {
  return {{"kind", kind == OptimizerKind::sgd ? "sgd" : "adam"},
          {"learning_rate", learning_rate},
          {"momentum", momentum},
          {"clip_norm", clip_norm},
          {"beta1", beta1},
          {"beta2", beta2},
          {"epsilon", epsilon}};
}

OptimizerConfig OptimizerConfig::from_json(const nlohmann::json& j) {
  OptimizerConfig c;
  const std::string kind = j.value("kind", std::string("sgd"));
  if (kind == "sgd")
    c.kind = OptimizerKind::sgd;
  else if (kind == "adam")
    c.kind = OptimizerKind::adam;
  else
    throw ConfigError("optimizer: unknown kind '" + kind + "'");
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.momentum = j.value("momentum", c.momentum);
  c.clip_norm = j.value("clip_norm", c.clip_norm);
  c.beta1 = j.value("beta1", c.beta1);
  c.beta2 = j.value("beta2", c.beta2);
  c.epsilon = j.value("epsilon", c.epsilon);
  c.validate();
  return c;
}

double Optimizer::step(const ParamList& params) {
  if (m_.empty()) {
    for (const Tensor* p : params) {
      m_.emplace_back(p->size(), 0.0);
      if (cfg_.kind == OptimizerKind::adam) v_.emplace_back(p->size(), 0.0);
    }
  }
  if (m_.size() != params.size()) throw ShapeError("optimizer", "parameter list changed between steps");
  double sq = 0.0;
  for (const Tensor* p : params)
    for (double g : p->grad.values()) sq += g * g;
  const double norm = std::sqrt(sq);
  const double scale = cfg_.clip_norm > 0.0 && norm > cfg_.clip_norm ? cfg_.clip_norm / norm : 1.0;
  ++t_;
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto& value = params[k]->value.values();
    const auto& grad = params[k]->grad.values();
    if (value.size() != m_[k].size()) throw ShapeError("optimizer", "parameter shape changed");
    if (cfg_.kind == OptimizerKind::sgd) {
      for (std::size_t i = 0; i < value.size(); ++i) {
        m_[k][i] = cfg_.momentum * m_[k][i] - cfg_.learning_rate * scale * grad[i];
        value[i] += m_[k][i];
      }
    } else {
      const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
      const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
      for (std::size_t i = 0; i < value.size(); ++i) {
        const double g = scale * grad[i];
        m_[k][i] = cfg_.beta1 * m_[k][i] + (1.0 - cfg_.beta1) * g;
        v_[k][i] = cfg_.beta2 * v_[k][i] + (1.0 - cfg_.beta2) * g * g;
        value[i] -= cfg_.learning_rate * (m_[k][i] / c1) / (std::sqrt(v_[k][i] / c2) + cfg_.epsilon);
      }
    }
  }
  return norm;
}

}  // namespace vb::nn
