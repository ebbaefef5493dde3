// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#include "vb/wavenet/wavenet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "vb/common/error.hpp"
#include "vb/common/log.hpp"
#include "vb/nn/checkpoint.hpp"
#include "vb/nn/loss.hpp"

namespace vb::wavenet {
namespace {

constexpr int kF0Classes = 256;

void init_embedding(nn::Tensor& t, Rng& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (double& v : t.value.values()) v = u(rng);
  t.zero_grad();
}

Matrix relu(const Matrix& x) {
  Matrix y = x;
  for (double& v : y.values()) v = std::max(v, 0.0);
  return y;
}

void relu_backward(const Matrix& x, Matrix& dy) {
  for (std::size_t i = 0; i < dy.size(); ++i)
    if (!(x.values()[i] > 0.0)) dy.values()[i] = 0.0;
}

// y = b + x W for a single row.
void affine_row(const nn::Tensor& w, const nn::Tensor& b, std::span<const double> x, std::span<double> y) {
  const std::size_t out = w.value.cols();
  std::copy(b.value.values().begin(), b.value.values().end(), y.begin());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    if (xi == 0.0) continue;
    const double* wi = w.value.data() + i * out;
    for (std::size_t j = 0; j < out; ++j) y[j] += xi * wi[j];
  }
}

void log_softmax_inplace(std::span<double> v) {
  const double m = *std::max_element(v.begin(), v.end());
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  const double lse = m + std::log(s);
  for (double& x : v) x -= lse;
}

}  // namespace

WavenetConfig WavenetConfig::full() {
  WavenetConfig c;
  c.blocks = 40;
  c.levels = 1024;
  c.mu = 1023.0;
  return c;
}

void WavenetConfig::validate() const {
  if (blocks == 0 || residual == 0 || skip == 0 || post == 0 || f0_embedding == 0 || upsample == 0)
    throw ConfigError("wavenet: all sizes must be positive");
  if (levels < 2) throw ConfigError("wavenet: need at least two output classes");
  if (!(mu > 0)) throw ConfigError("wavenet: mu must be positive");
  if (sample_rate <= 0) throw ConfigError("wavenet: sample rate must be positive");
}

nlohmann::json WavenetConfig::to_json() const {
  return {{"blocks", blocks},     {"residual", residual},         {"skip", skip},
          {"post", post},         {"levels", levels},             {"mu", mu},
          {"mgc_dims", mgc_dims}, {"f0_embedding", f0_embedding}, {"upsample", upsample},
          {"sample_rate", sample_rate}};
}

WavenetConfig WavenetConfig::from_json(const nlohmann::json& j) {
  WavenetConfig c;
  c.blocks = j.value("blocks", c.blocks);
  c.residual = j.value("residual", c.residual);
  c.skip = j.value("skip", c.skip);
  c.post = j.value("post", c.post);
  c.levels = j.value("levels", c.levels);
  c.mu = j.value("mu", static_cast<double>(c.levels - 1));
  c.mgc_dims = j.value("mgc_dims", c.mgc_dims);
  c.f0_embedding = j.value("f0_embedding", c.f0_embedding);
  c.upsample = j.value("upsample", c.upsample);
  c.sample_rate = j.value("sample_rate", c.sample_rate);
  c.validate();
  return c;
}

std::size_t receptive_field(const WavenetConfig& cfg) {
  std::size_t r = 1;
  for (std::size_t k = 0; k < cfg.blocks; ++k) r += cfg.dilation(k);
  return r;
}

VoicedMode parse_voiced_mode(const std::string& s) {
  if (s == "greedy") return VoicedMode::greedy;
  if (s == "random") return VoicedMode::random;
  throw ConfigError("unknown voiced generation mode '" + s + "'");
}

nlohmann::json WavenetTrainConfig::to_json() const {
  return {{"steps", steps}, {"segment", segment}, {"opt", opt.to_json()}, {"seed", seed}};
}

WavenetTrainConfig WavenetTrainConfig::from_json(const nlohmann::json& j) {
  WavenetTrainConfig c;
  c.steps = j.value("steps", c.steps);
  c.segment = j.value("segment", c.segment);
  if (j.contains("opt")) c.opt = nn::OptimizerConfig::from_json(j.at("opt"));
  c.seed = j.value("seed", c.seed);
  return c;
}

// ---------------------------------------------------------------------------

Wavenet::Wavenet(const WavenetConfig& cfg, std::uint64_t seed) : cfg_(cfg) {
  cfg_.validate();
  build(seed);
}

void Wavenet::build(std::uint64_t seed) {
  const std::size_t C = cfg_.residual, S = cfg_.skip, L = static_cast<std::size_t>(cfg_.levels);
  input_emb_ = nn::Tensor("input_embedding", L, C);
  f0_emb_ = nn::Tensor("f0_embedding", kF0Classes, cfg_.f0_embedding);
  blocks_.clear();
  for (std::size_t k = 0; k < cfg_.blocks; ++k) {
    nn::LayerSpec spec{nn::LayerKind::dilated_causal_block, C, C};
    spec.dilation = cfg_.dilation(k);
    spec.skip = S;
    spec.cond = cfg_.cond_dim();
    spec.upsample = cfg_.upsample;
    blocks_.push_back(std::make_unique<nn::DilatedCausalBlock>(spec));
  }
  post_ = std::make_unique<nn::Linear>(nn::LayerSpec{nn::LayerKind::linear, S, cfg_.post});
  head_ = std::make_unique<nn::SoftmaxHead>(nn::LayerSpec{nn::LayerKind::softmax_head, cfg_.post, L});
  mgc_norm_ = acoustic::Standardizer::identity(cfg_.mgc_dims);

  Rng rng(seed);
  init_embedding(input_emb_, rng);
  init_embedding(f0_emb_, rng);
  for (auto& b : blocks_) b->init(rng);
  post_->init(rng);
  head_->weight().value.fill(0.0);
  head_->bias().value.fill(0.0);
  nn::zero_grad(params());
}

void Wavenet::randomize_output_layer(std::uint64_t seed) {
  Rng rng(seed);
  head_->init(rng);
}

nn::ParamList Wavenet::params() {
  nn::ParamList p{&input_emb_, &f0_emb_};
  for (auto& b : blocks_)
    for (auto* t : b->params()) p.push_back(t);
  for (auto* t : post_->params()) p.push_back(t);
  for (auto* t : head_->params()) p.push_back(t);
  return p;
}

Matrix Wavenet::frame_conditioning(const ConditioningTrack& cond) const {
  cond.validate();
  if (cond.factor != cfg_.upsample)
    throw ShapeError("wavenet", "conditioning upsampling " + std::to_string(cond.factor) + " vs model " +
                                    std::to_string(cfg_.upsample));
  if (cond.mgc.cols() != cfg_.mgc_dims)
    throw ShapeError("wavenet", "conditioning has " + std::to_string(cond.mgc.cols()) + " MGC dims, expected " +
                                    std::to_string(cfg_.mgc_dims));
  const Matrix mgc = mgc_norm_.apply(cond.mgc);
  const std::size_t M = cfg_.mgc_dims, E = cfg_.f0_embedding;
  Matrix fc(cond.frames(), M + E);
  for (std::size_t n = 0; n < cond.frames(); ++n) {
    const int q = cond.qf0[n];
    if (q < 0 || q >= kF0Classes) throw InputError("wavenet: quantised F0 level out of range");
    auto dst = fc.row(n);
    auto m = mgc.row(n);
    std::copy(m.begin(), m.end(), dst.begin());
    auto e = f0_emb_.value.row(static_cast<std::size_t>(q));
    std::copy(e.begin(), e.end(), dst.begin() + static_cast<long>(M));
  }
  return fc;
}

void Wavenet::check_levels(const std::vector<int>& levels) const {
  for (int v : levels)
    if (v < 0 || v >= cfg_.levels) throw InputError("wavenet: waveform level out of range");
}

Matrix Wavenet::log_probs(const std::vector<int>& levels, const ConditioningTrack& cond, int prev) {
  check_levels(levels);
  const Matrix fc = frame_conditioning(cond);
  if (levels.size() != cond.samples())
    throw ShapeError("wavenet", std::to_string(levels.size()) + " samples vs " + std::to_string(cond.samples()) +
                                    " conditioned samples");
  const std::size_t T = levels.size(), C = cfg_.residual, S = cfg_.skip;
  const int zero = signal::mu_law_level(0.0, cfg_.levels, cfg_.mu);
  inputs_.resize(T);
  for (std::size_t t = 0; t < T; ++t) inputs_[t] = t == 0 ? (prev < 0 ? zero : prev) : levels[t - 1];
  cond_levels_ = cond.qf0;

  Matrix h(T, C);
  for (std::size_t t = 0; t < T; ++t) {
    auto e = input_emb_.value.row(static_cast<std::size_t>(inputs_[t]));
    std::copy(e.begin(), e.end(), h.row(t).begin());
  }
  skip_sum_ = Matrix(T, S);
  for (auto& b : blocks_) {
    b->set_conditioning(fc);
    const Matrix out = b->forward(h);
    for (std::size_t t = 0; t < T; ++t) {
      auto o = out.row(t);
      std::copy_n(o.begin(), C, h.row(t).begin());
      auto s = skip_sum_.row(t);
      for (std::size_t j = 0; j < S; ++j) s[j] += o[C + j];
    }
  }
  post_in_ = post_->forward(relu(skip_sum_));
  return head_->forward(relu(post_in_));
}

double Wavenet::nll_backward(const std::vector<int>& levels, const ConditioningTrack& cond, int prev) {
  auto r = nn::categorical_nll(log_probs(levels, cond, prev), levels);
  const std::size_t T = levels.size(), C = cfg_.residual, S = cfg_.skip, M = cfg_.mgc_dims;
  const double inv = 1.0 / static_cast<double>(T);
  for (double& g : r.grad.values()) g *= inv;

  Matrix d = head_->backward(r.grad);
  relu_backward(post_in_, d);
  Matrix dskip = post_->backward(d);
  relu_backward(skip_sum_, dskip);

  Matrix dh(T, C);
  Matrix dout(T, C + S);
  dout.set_col_block(C, dskip);
  Matrix dcond;
  for (std::size_t k = blocks_.size(); k-- > 0;) {
    dout.set_col_block(0, dh);
    dh = blocks_[k]->backward(dout);
    const Matrix& dc = blocks_[k]->cond_gradient();
    if (dcond.empty())
      dcond = dc;
    else
      for (std::size_t i = 0; i < dc.size(); ++i) dcond.values()[i] += dc.values()[i];
  }
  for (std::size_t t = 0; t < T; ++t) {
    auto g = input_emb_.grad.row(static_cast<std::size_t>(inputs_[t]));
    auto src = dh.row(t);
    for (std::size_t j = 0; j < C; ++j) g[j] += src[j];
  }
  for (std::size_t n = 0; n < cond_levels_.size(); ++n) {
    auto g = f0_emb_.grad.row(static_cast<std::size_t>(cond_levels_[n]));
    for (std::size_t j = 0; j < cfg_.f0_embedding; ++j) g[j] += dcond(n, M + j);
  }
  return r.loss * inv;
}

void Wavenet::fit_conditioning(const std::vector<WavenetExample>& data) {
  std::vector<Matrix> mgc;
  for (const auto& ex : data) mgc.push_back(ex.cond.mgc);
  mgc_norm_ = acoustic::Standardizer::fit(mgc);
  if (mgc_norm_.dim() != cfg_.mgc_dims) throw ShapeError("wavenet", "training MGC dimension mismatch");
}

void Wavenet::set_optimizer(const nn::OptimizerConfig& opt) { opt_ = std::make_unique<nn::Optimizer>(opt); }

double Wavenet::train_step(const WavenetExample& ex, std::size_t first_frame, std::size_t frames) {
  if (!opt_) set_optimizer({});
  const std::size_t U = cfg_.upsample;
  const auto cond = ex.cond.slice(first_frame, frames);
  const auto begin = ex.q.levels.begin() + static_cast<long>(first_frame * U);
  const std::vector<int> levels(begin, begin + static_cast<long>(frames * U));
  const int prev = first_frame == 0 ? -1 : ex.q.levels[first_frame * U - 1];
  const auto p = params();
  nn::zero_grad(p);
  const double loss = nll_backward(levels, cond, prev);
  opt_->step(p);
  return loss;
}

int argmax(std::span<const double> v) {
  int best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[static_cast<std::size_t>(best)]) best = static_cast<int>(i);
  return best;
}

int sample_categorical(std::span<const double> logp, Rng& rng) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  double cdf = 0.0;
  int last = 0;
  for (std::size_t i = 0; i < logp.size(); ++i) {
    const double p = std::exp(logp[i]);
    if (p <= 0.0) continue;
    last = static_cast<int>(i);
    cdf += p;
    if (u < cdf) return last;
  }
  return last;
}

signal::QuantizedWave Wavenet::generate(const ConditioningTrack& cond, const GenerationPolicy& policy) {
  const Matrix fc = frame_conditioning(cond);
  const std::size_t T = cond.samples(), C = cfg_.residual, S = cfg_.skip, U = cfg_.upsample;
  const std::size_t L = static_cast<std::size_t>(cfg_.levels);
  std::vector<Matrix> cps;
  for (auto& b : blocks_) {
    b->reset_state();
    cps.push_back(b->conditioning_projection(fc));
  }
  Rng rng(policy.seed);
  signal::QuantizedWave out;
  out.num_levels = cfg_.levels;
  out.mu = cfg_.mu;
  out.sample_rate = cfg_.sample_rate;
  out.levels.resize(T);
  if (keep_gen_logp_) gen_logp_ = Matrix(T, L);

  std::vector<double> x(C), blk(C + S), skip(S), hidden(cfg_.post), logp(L);
  int prev = signal::mu_law_level(0.0, cfg_.levels, cfg_.mu);
  for (std::size_t t = 0; t < T; ++t) {
    auto e = input_emb_.value.row(static_cast<std::size_t>(prev));
    std::copy(e.begin(), e.end(), x.begin());
    std::fill(skip.begin(), skip.end(), 0.0);
    for (std::size_t k = 0; k < blocks_.size(); ++k) {
      blocks_[k]->step(x, cps[k].row(t / U), blk);
      std::copy_n(blk.begin(), C, x.begin());
      for (std::size_t j = 0; j < S; ++j) skip[j] += blk[C + j];
    }
    for (double& v : skip) v = std::max(v, 0.0);
    affine_row(post_->weight(), post_->bias(), skip, hidden);
    for (double& v : hidden) v = std::max(v, 0.0);
    affine_row(head_->weight(), head_->bias(), hidden, logp);
    log_softmax_inplace(logp);
    if (keep_gen_logp_) std::copy(logp.begin(), logp.end(), gen_logp_.row(t).begin());
    const bool greedy = cond.voiced(t) && policy.voiced_mode == VoicedMode::greedy;
    const int o = greedy ? argmax(logp) : sample_categorical(logp, rng);
    out.levels[t] = o;
    prev = o;
  }
  return out;
}

nlohmann::json Wavenet::arch_json() const {
  return {{"type", "wavenet"}, {"config", cfg_.to_json()}, {"mgc_norm", mgc_norm_.to_json()}};
}

void Wavenet::save(const std::filesystem::path& path) { nn::save_checkpoint(path, arch_json(), params()); }

Wavenet Wavenet::load(const std::filesystem::path& path) {
  const auto ck = nn::load_checkpoint(path);
  if (ck.arch.value("type", std::string()) != "wavenet")
    throw IoError(path.string() + ": not a wavenet checkpoint");
  Wavenet m(WavenetConfig::from_json(ck.arch.at("config")), 0);
  m.mgc_norm_ = acoustic::Standardizer::from_json(ck.arch.at("mgc_norm"));
  nn::restore_params(ck, m.params());
  return m;
}

// ---------------------------------------------------------------------------

WavenetExample make_example(signal::QuantizedWave q, ConditioningTrack cond) {
  cond.validate();
  const std::size_t frames = std::min(cond.frames(), q.levels.size() / cond.factor);
  if (frames < cond.frames()) cond = cond.slice(0, frames);
  q.levels.resize(frames * cond.factor);
  return {std::move(q), std::move(cond)};
}

double wavenet_nll(Wavenet& model, const signal::QuantizedWave& q, const ConditioningTrack& cond) {
  if (q.num_levels != model.config().levels)
    throw ShapeError("wavenet_nll", "waveform has " + std::to_string(q.num_levels) + " levels, model " +
                                        std::to_string(model.config().levels));
  const Matrix logp = model.log_probs(q.levels, cond);
  return nn::categorical_nll(logp, q.levels).loss / static_cast<double>(q.levels.size());
}

double wavenet_accuracy(Wavenet& model, const signal::QuantizedWave& q, const ConditioningTrack& cond) {
  const Matrix logp = model.log_probs(q.levels, cond);
  std::size_t hits = 0;
  for (std::size_t t = 0; t < q.levels.size(); ++t) hits += argmax(logp.row(t)) == q.levels[t];
  return static_cast<double>(hits) / static_cast<double>(q.levels.size());
}

signal::QuantizedWave wavenet_generate(Wavenet& model, const ConditioningTrack& cond,
                                       const GenerationPolicy& policy) {
  return model.generate(cond, policy);
}

std::vector<double> wavenet_train(Wavenet& model, const std::vector<WavenetExample>& data,
                                  const WavenetTrainConfig& cfg,
                                  const std::function<void(std::size_t, double)>& on_step) {
  if (data.empty()) throw InputError("wavenet_train: no training data");
  for (const auto& ex : data) {
    if (ex.q.levels.size() != ex.cond.samples())
      throw ShapeError("wavenet_train", std::to_string(ex.q.levels.size()) + " samples vs " +
                                            std::to_string(ex.cond.samples()) + " conditioned samples");
    if (ex.cond.frames() == 0) throw InputError("wavenet_train: empty example");
  }
  model.fit_conditioning(data);
  model.set_optimizer(cfg.opt);
  Rng rng(derive_seed(cfg.seed, "wavenet.segments"));
  const std::size_t seg_frames = std::max<std::size_t>(1, cfg.segment / model.config().upsample);
  std::vector<double> curve;
  curve.reserve(cfg.steps);
  for (std::size_t step = 0; step < cfg.steps; ++step) {
    const auto& ex = data[rng() % data.size()];
    const std::size_t avail = ex.cond.frames();
    const std::size_t frames = std::min(seg_frames, avail);
    const std::size_t first = avail == frames ? 0 : rng() % (avail - frames + 1);
    const double loss = model.train_step(ex, first, frames);
    curve.push_back(loss);
    if (on_step) on_step(step, loss);
  }
  return curve;
}

}  // namespace vb::wavenet
