// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#include "vb/acoustic/f0_model.hpp"

#include <algorithm>
#include <string>

#include "vb/common/error.hpp"
#include "vb/common/rng.hpp"
#include "vb/nn/loss.hpp"

namespace vb::acoustic {
namespace {

constexpr std::size_t kClasses = features::F0Codebook::kClasses;

void check_pair(const Matrix& l, const features::QuantizedF0& q) {
  if (l.rows() != q.levels.size())
    throw ShapeError("f0_model", std::to_string(l.rows()) + " linguistic frames vs " +
                                     std::to_string(q.levels.size()) + " F0 frames");
  for (int v : q.levels)
    if (v < 0 || v >= static_cast<int>(kClasses)) throw InputError("f0_model: level out of range");
}

}  // namespace

nlohmann::json F0ModelConfig::to_json() const {
  return {{"ff_size", ff_size}, {"bi_size", bi_size}, {"head_size", head_size}, {"opt", opt.to_json()}};
}

F0ModelConfig F0ModelConfig::from_json(const nlohmann::json& j) {
  F0ModelConfig c;
  c.ff_size = j.value("ff_size", c.ff_size);
  c.bi_size = j.value("bi_size", c.bi_size);
  c.head_size = j.value("head_size", c.head_size);
  if (j.contains("opt")) c.opt = nn::OptimizerConfig::from_json(j["opt"]);
  return c;
}

F0Model::F0Model(std::size_t ling_dim, const F0ModelConfig& cfg, std::uint64_t seed) : cfg_(cfg) {
  context_.add({nn::LayerKind::ff_tanh, ling_dim, cfg.ff_size});
  context_.add({nn::LayerKind::bi_recurrent, cfg.ff_size, cfg.bi_size});
  head_.add({nn::LayerKind::ff_tanh, 2 * cfg.bi_size + kClasses, cfg.head_size});
  head_.add({nn::LayerKind::softmax_head, cfg.head_size, kClasses});
  context_.init(derive_seed(seed, "f0.context"));
  head_.init(derive_seed(seed, "f0.head"));
  opt_ = std::make_unique<nn::Optimizer>(cfg.opt);
}

Matrix F0Model::head_input(const Matrix& ctx, const features::QuantizedF0& q) const {
  const std::size_t N = ctx.rows(), C = ctx.cols();
  Matrix in(N, C + kClasses);
  for (std::size_t n = 0; n < N; ++n) {
    std::copy_n(ctx.data() + n * C, C, in.data() + n * in.cols());
    const int prev = n == 0 ? 0 : q.levels[n - 1];
    in(n, C + prev) = 1.0;
  }
  return in;
}

Matrix F0Model::log_probs(const Matrix& l, const features::QuantizedF0& q) {
  check_pair(l, q);
  return head_.forward(head_input(context_.forward(l), q));
}

double F0Model::train_step(const Matrix& l, const features::QuantizedF0& q) {
  check_pair(l, q);
  if (l.rows() == 0) throw InputError("f0_model: empty utterance");
  nn::zero_grad(params());
  const Matrix ctx = context_.forward(l);
  auto r = nn::categorical_nll(head_.forward(head_input(ctx, q)), q.levels);
  const double n = static_cast<double>(l.rows());
  for (double& g : r.grad.values()) g /= n;
  const Matrix din = head_.backward(r.grad);
  context_.backward(din.col_block(0, ctx.cols()));
  opt_->step(params());
  return r.loss / n;
}

double F0Model::teacher_forced_accuracy(const Matrix& l, const features::QuantizedF0& q) {
  const Matrix lp = log_probs(l, q);
  std::size_t hit = 0;
  for (std::size_t n = 0; n < lp.rows(); ++n) {
    auto r = lp.row(n);
    const auto best = std::max_element(r.begin(), r.end()) - r.begin();
    hit += best == q.levels[n];
  }
  return lp.rows() == 0 ? 1.0 : static_cast<double>(hit) / lp.rows();
}

features::QuantizedF0 F0Model::generate(const Matrix& l) {
  const Matrix ctx = context_.forward(l);
  const std::size_t C = ctx.cols();
  features::QuantizedF0 out{std::vector<int>(l.rows(), 0)};
  Matrix in(1, C + kClasses);
  int prev = 0;
  for (std::size_t n = 0; n < l.rows(); ++n) {
    in.fill(0.0);
    std::copy_n(ctx.data() + n * C, C, in.data());
    in(0, C + prev) = 1.0;
    const Matrix lp = head_.forward(in);
    auto r = lp.row(0);
    prev = static_cast<int>(std::max_element(r.begin(), r.end()) - r.begin());
    out.levels[n] = prev;
  }
  return out;
}

nn::ParamList F0Model::params() {
  nn::ParamList p = context_.params();
  for (nn::Tensor* t : head_.params()) p.push_back(t);
  return p;
}

nlohmann::json F0Model::arch_json() const {
  return {{"f0_model", cfg_.to_json()}, {"context", context_.arch_json()}, {"head", head_.arch_json()}};
}

F0Model F0Model::from_arch_json(const nlohmann::json& j) {
  F0Model m;
  m.cfg_ = F0ModelConfig::from_json(j.at("f0_model"));
  m.context_ = nn::Network::from_arch_json(j.at("context"));
  m.head_ = nn::Network::from_arch_json(j.at("head"));
  m.opt_ = std::make_unique<nn::Optimizer>(m.cfg_.opt);
  return m;
}

double f0_model_train(F0Model& m, const Matrix& l, const features::QuantizedF0& q) { return m.train_step(l, q); }
features::QuantizedF0 f0_model_generate(F0Model& m, const Matrix& l) { return m.generate(l); }

}  // namespace vb::acoustic
