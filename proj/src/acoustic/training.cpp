// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#include "vb/acoustic/training.hpp"

#include <algorithm>
#include <numeric>

#include "vb/common/error.hpp"
#include "vb/common/rng.hpp"
#include "vb/nn/checkpoint.hpp"

namespace vb::acoustic {

nlohmann::json AcousticTrainConfig::to_json() const {
  return {{"kind", kind == AcousticKind::rnn ? "rnn" : "sar"},
          {"net", net.to_json()},
          {"opt", opt.to_json()},
          {"steps", steps},
          {"seed", seed},
          {"mgc_dims", mgc_dims},
          {"bap_dims", bap_dims}};
}

AcousticTrainConfig AcousticTrainConfig::from_json(const nlohmann::json& j) {
  AcousticTrainConfig c;
  const std::string kind = j.value("kind", std::string("sar"));
  if (kind == "rnn")
    c.kind = AcousticKind::rnn;
  else if (kind == "sar")
    c.kind = AcousticKind::sar;
  else
    throw ConfigError("acoustic model: unknown kind '" + kind + "'");
  if (j.contains("net")) c.net = AcousticNetConfig::from_json(j["net"]);
  if (j.contains("opt")) c.opt = nn::OptimizerConfig::from_json(j["opt"]);
  c.steps = j.value("steps", c.steps);
  c.seed = j.value("seed", c.seed);
  c.mgc_dims = j.value("mgc_dims", c.mgc_dims);
  c.bap_dims = j.value("bap_dims", c.bap_dims);
  return c;
}

AcousticModel::AcousticModel(std::size_t ling_dim, const AcousticTrainConfig& cfg)
    : cfg_(cfg),
      net_(make_acoustic_network(ling_dim, cfg.mgc_dims + cfg.bap_dims, cfg.net)),
      sar_(default_sar(cfg.mgc_dims, cfg.bap_dims)),
      in_norm_(Standardizer::identity(ling_dim)),
      out_norm_(Standardizer::identity(cfg.mgc_dims + cfg.bap_dims)) {
  net_.init(derive_seed(cfg.seed, "acoustic.net"));
}

nn::ParamList AcousticModel::params() {
  nn::ParamList p = net_.params();
  if (cfg_.kind == AcousticKind::sar)
    for (nn::Tensor* t : sar_.params()) p.push_back(t);
  return p;
}

std::vector<double> AcousticModel::train(const std::vector<TrainingPair>& data,
                                         const std::function<void(std::size_t, double)>& on_step) {
  if (data.empty()) throw InputError("acoustic training: no utterances");
  std::vector<Matrix> ls, as;
  for (const auto& p : data) {
    ls.push_back(p.l);
    as.push_back(p.a);
  }
  in_norm_ = Standardizer::fit(ls);
  out_norm_ = Standardizer::fit(as);
  std::vector<TrainingPair> z;
  for (const auto& p : data) z.push_back({in_norm_.apply(p.l), out_norm_.apply(p.a)});

  nn::Optimizer opt(cfg_.opt);
  Rng rng(derive_seed(cfg_.seed, "acoustic.order"));
  std::vector<std::size_t> order(z.size());
  std::vector<double> curve;
  curve.reserve(cfg_.steps);
  for (std::size_t step = 0; step < cfg_.steps; ++step) {
    if (step % z.size() == 0) {
      std::iota(order.begin(), order.end(), 0);
      std::shuffle(order.begin(), order.end(), rng);
    }
    const auto& p = z[order[step % z.size()]];
    const double w = 1.0 / static_cast<double>(p.l.rows());
    const auto params = this->params();
    nn::zero_grad(params);
    const double loss = cfg_.kind == AcousticKind::sar ? sar_nll_backward(net_, sar_, p.l, p.a, w)
                                                       : rnn_nll_backward(net_, p.l, p.a, w);
    opt.step(params);
    curve.push_back(loss * w);
    if (on_step) on_step(step, loss * w);
  }
  return curve;
}

Matrix AcousticModel::generate(const Matrix& l) {
  const Matrix z = in_norm_.apply(l);
  const Matrix a = cfg_.kind == AcousticKind::sar ? sar_generate(net_, sar_, z) : rnn_generate(net_, z);
  return out_norm_.invert(a);
}

nlohmann::json AcousticModel::arch_json() const {
  return {{"type", "acoustic"},
          {"config", cfg_.to_json()},
          {"network", net_.arch_json()},
          {"in_norm", in_norm_.to_json()},
          {"out_norm", out_norm_.to_json()}};
}

void AcousticModel::save(const std::filesystem::path& path) {
  nn::save_checkpoint(path, arch_json(), params());
}

AcousticModel AcousticModel::load(const std::filesystem::path& path) {
  const auto ck = nn::load_checkpoint(path);
  if (ck.arch.value("type", std::string()) != "acoustic")
    throw IoError(path.string() + ": not an acoustic model checkpoint");
  AcousticModel m;
  m.cfg_ = AcousticTrainConfig::from_json(ck.arch.at("config"));
  m.net_ = nn::Network::from_arch_json(ck.arch.at("network"));
  m.sar_ = default_sar(m.cfg_.mgc_dims, m.cfg_.bap_dims);
  m.in_norm_ = Standardizer::from_json(ck.arch.at("in_norm"));
  m.out_norm_ = Standardizer::from_json(ck.arch.at("out_norm"));
  nn::restore_params(ck, m.params());
  return m;
}

}  // namespace vb::acoustic
