// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#include "vb/acoustic/gan.hpp"

#include <string>

#include "vb/common/error.hpp"
#include "vb/common/rng.hpp"
#include "vb/nn/loss.hpp"

namespace vb::acoustic {
namespace {

constexpr std::size_t kDims = kGanMgcDims + kGanBapDims;

void check_layout(const Matrix& m, const char* where) {
  if (m.cols() != kDims)
    throw ShapeError(where, "expected MGC(60)+BAP(25) = 85 columns, got " + std::to_string(m.cols()));
}

void zero_last_layer(nn::Network& net) {
  for (nn::Tensor* p : dynamic_cast<nn::Linear&>(net.layer(net.size() - 1)).params()) p->value.fill(0.0);
}

}  // namespace

std::vector<double> gan_scale_weights() {
  std::vector<double> w(kDims, 0.0);
  for (std::size_t j = 0; j < kGanMgcDims; ++j) w[j] = j < 5 ? 0.001 : j < 10 ? 0.01 : 1.0;
  return w;
}

Matrix gan_scale(const Matrix& features) {
  check_layout(features, "gan_scale");
  static const std::vector<double> w = gan_scale_weights();
  Matrix out = features;
  for (std::size_t t = 0; t < out.rows(); ++t)
    for (std::size_t j = 0; j < kDims; ++j) out(t, j) *= w[j];
  return out;
}

nlohmann::json GanConfig::to_json() const {
  return {{"channels", channels},
          {"width", width},
          {"anchor_weight", anchor_weight},
          {"generator_opt", generator_opt.to_json()},
          {"discriminator_opt", discriminator_opt.to_json()}};
}

GanConfig GanConfig::from_json(const nlohmann::json& j) {
  GanConfig c;
  c.channels = j.value("channels", c.channels);
  c.width = j.value("width", c.width);
  c.anchor_weight = j.value("anchor_weight", c.anchor_weight);
  if (j.contains("generator_opt")) c.generator_opt = nn::OptimizerConfig::from_json(j["generator_opt"]);
  if (j.contains("discriminator_opt"))
    c.discriminator_opt = nn::OptimizerConfig::from_json(j["discriminator_opt"]);
  return c;
}

GanPostfilter::GanPostfilter(const GanConfig& cfg, std::uint64_t seed) : cfg_(cfg) {
  nn::LayerSpec conv{nn::LayerKind::conv1d, kGanMgcDims, cfg.channels};
  conv.width = cfg.width;
  gen_.add(conv);
  gen_.add({nn::LayerKind::ff_tanh, cfg.channels, cfg.channels});
  gen_.add({nn::LayerKind::linear, cfg.channels, kGanMgcDims});
  conv.in = kDims;
  disc_.add(conv);
  disc_.add({nn::LayerKind::ff_tanh, cfg.channels, cfg.channels});
  disc_.add({nn::LayerKind::linear, cfg.channels, 1});
  gen_.init(derive_seed(seed, "gan.generator"));
  disc_.init(derive_seed(seed, "gan.discriminator"));
  zero_last_layer(gen_);
  zero_last_layer(disc_);
  gopt_ = std::make_unique<nn::Optimizer>(cfg.generator_opt);
  dopt_ = std::make_unique<nn::Optimizer>(cfg.discriminator_opt);
}

Matrix GanPostfilter::generate_mgc_delta(const Matrix& mgc) { return gen_.forward(mgc); }

Matrix GanPostfilter::apply(const Matrix& a_hat) {
  check_layout(a_hat, "gan_apply");
  const Matrix delta = generate_mgc_delta(a_hat.col_block(0, kGanMgcDims));
  Matrix out = a_hat;
  for (std::size_t t = 0; t < out.rows(); ++t)
    for (std::size_t j = 0; j < kGanMgcDims; ++j) out(t, j) += delta(t, j);
  return out;
}

double GanPostfilter::discriminator_loss(const Matrix& real, const Matrix& fake) {
  check_layout(real, "gan discriminator");
  check_layout(fake, "gan discriminator");
  const double lr = nn::binary_cross_entropy(disc_.forward(gan_scale(real)), 1.0).loss / real.rows();
  const double lf = nn::binary_cross_entropy(disc_.forward(gan_scale(fake)), 0.0).loss / fake.rows();
  return 0.5 * (lr + lf);
}

GanLosses GanPostfilter::train_step(const Matrix& real, const Matrix& a_hat) {
  check_layout(real, "gan_train_step");
  check_layout(a_hat, "gan_train_step");
  if (real.rows() == 0 || a_hat.rows() == 0) throw InputError("gan_train_step: empty sequence");
  GanLosses out;

  const Matrix fake = apply(a_hat);
  nn::zero_grad(disc_.params());
  {
    auto r = nn::binary_cross_entropy(disc_.forward(gan_scale(real)), 1.0);
    for (double& g : r.grad.values()) g *= 0.5 / real.rows();
    disc_.backward(r.grad);
    auto f = nn::binary_cross_entropy(disc_.forward(gan_scale(fake)), 0.0);
    for (double& g : f.grad.values()) g *= 0.5 / fake.rows();
    disc_.backward(f.grad);
    out.d_loss = 0.5 * (r.loss / real.rows() + f.loss / fake.rows());
  }
  dopt_->step(disc_.params());

  nn::zero_grad(gen_.params());
  const std::size_t N = a_hat.rows();
  const Matrix delta = generate_mgc_delta(a_hat.col_block(0, kGanMgcDims));
  Matrix g_out = a_hat;
  for (std::size_t t = 0; t < N; ++t)
    for (std::size_t j = 0; j < kGanMgcDims; ++j) g_out(t, j) += delta(t, j);
  auto adv = nn::binary_cross_entropy(disc_.forward(gan_scale(g_out)), 1.0);
  for (double& g : adv.grad.values()) g /= N;
  const Matrix dscaled = disc_.backward(adv.grad);
  static const std::vector<double> w = gan_scale_weights();
  Matrix ddelta(N, kGanMgcDims);
  double anchor = 0.0;
  for (std::size_t t = 0; t < N; ++t)
    for (std::size_t j = 0; j < kGanMgcDims; ++j) {
      anchor += delta(t, j) * delta(t, j);
      ddelta(t, j) = dscaled(t, j) * w[j] + 2.0 * cfg_.anchor_weight * delta(t, j) / N;
    }
  out.g_loss = adv.loss / N + cfg_.anchor_weight * anchor / N;
  gen_.backward(ddelta);
  gopt_->step(gen_.params());
  return out;
}

nn::ParamList GanPostfilter::params() {
  nn::ParamList p = gen_.params();
  for (nn::Tensor* t : disc_.params()) p.push_back(t);
  return p;
}

nlohmann::json GanPostfilter::arch_json() const {
  return {{"gan", cfg_.to_json()}, {"generator", gen_.arch_json()}, {"discriminator", disc_.arch_json()}};
}

GanPostfilter GanPostfilter::from_arch_json(const nlohmann::json& j) {
  GanPostfilter pf;
  pf.cfg_ = GanConfig::from_json(j.at("gan"));
  pf.gen_ = nn::Network::from_arch_json(j.at("generator"));
  pf.disc_ = nn::Network::from_arch_json(j.at("discriminator"));
  pf.gopt_ = std::make_unique<nn::Optimizer>(pf.cfg_.generator_opt);
  pf.dopt_ = std::make_unique<nn::Optimizer>(pf.cfg_.discriminator_opt);
  return pf;
}

Matrix gan_apply(GanPostfilter& pf, const Matrix& a_hat) { return pf.apply(a_hat); }

GanLosses gan_train_step(GanPostfilter& pf, const Matrix& real, const Matrix& a_hat) {
  return pf.train_step(real, a_hat);
}

}  // namespace vb::acoustic
