// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#include "vb/acoustic/models.hpp"

#include <string>

#include "vb/common/error.hpp"
#include "vb/nn/loss.hpp"

namespace vb::acoustic {
namespace {

void check_pair(const nn::Network& net, const Matrix& l, const Matrix& a, const char* where) {
  if (l.rows() != a.rows())
    throw ShapeError(where, std::to_string(l.rows()) + " linguistic frames vs " + std::to_string(a.rows()) +
                                " acoustic frames");
  if (net.output_dim() != a.cols())
    throw ShapeError(where, "model emits " + std::to_string(net.output_dim()) + " dims, target has " +
                                std::to_string(a.cols()));
}

}  // namespace

nlohmann::json AcousticNetConfig::to_json() const {
  return {{"ff_size", ff_size}, {"ff_layers", ff_layers}, {"bi_size", bi_size}, {"uni_size", uni_size}};
}

AcousticNetConfig AcousticNetConfig::from_json(const nlohmann::json& j) {
  AcousticNetConfig c;
  c.ff_size = j.value("ff_size", c.ff_size);
  c.ff_layers = j.value("ff_layers", c.ff_layers);
  c.bi_size = j.value("bi_size", c.bi_size);
  c.uni_size = j.value("uni_size", c.uni_size);
  return c;
}

nn::Network make_acoustic_network(std::size_t in_dim, std::size_t out_dim, const AcousticNetConfig& cfg) {
  nn::Network net;
  std::size_t width = in_dim;
  for (std::size_t i = 0; i < cfg.ff_layers; ++i) {
    net.add({nn::LayerKind::ff_tanh, width, cfg.ff_size});
    width = cfg.ff_size;
  }
  net.add({nn::LayerKind::bi_recurrent, width, cfg.bi_size});
  net.add({nn::LayerKind::uni_recurrent, 2 * cfg.bi_size, cfg.uni_size});
  net.add({nn::LayerKind::gaussian_head, cfg.uni_size, out_dim});
  return net;
}

double rnn_nll(nn::Network& net, const Matrix& l, const Matrix& a) {
  check_pair(net, l, a, "rnn_nll");
  return nn::gaussian_nll(net.forward(l), a).loss;
}

double rnn_nll_backward(nn::Network& net, const Matrix& l, const Matrix& a, double weight) {
  check_pair(net, l, a, "rnn_nll");
  auto r = nn::gaussian_nll(net.forward(l), a);
  for (double& g : r.grad.values()) g *= weight;
  net.backward(r.grad);
  return r.loss;
}

Matrix rnn_generate(nn::Network& net, const Matrix& l) { return net.forward(l); }

// ---------------------------------------------------------------------------

SarParameters::SarParameters(std::size_t dim, std::vector<SarStream> streams)
    : gamma("sar.gamma", 1, dim), streams_(std::move(streams)) {
  std::vector<bool> used(dim, false);
  for (std::size_t s = 0; s < streams_.size(); ++s) {
    const auto& st = streams_[s];
    if (st.first + st.count > dim) throw ConfigError("sar: stream exceeds feature dimension");
    for (std::size_t j = st.first; j < st.first + st.count; ++j) {
      if (used[j]) throw ConfigError("sar: streams overlap");
      used[j] = true;
    }
    beta_.emplace_back("sar.beta" + std::to_string(s), st.order, st.count);
  }
}

nn::ParamList SarParameters::params() {
  nn::ParamList p;
  for (auto& b : beta_)
    if (b.size() > 0) p.push_back(&b);
  p.push_back(&gamma);
  return p;
}

nlohmann::json SarParameters::to_json() const {
  nlohmann::json streams = nlohmann::json::array();
  for (const auto& s : streams_) streams.push_back({{"first", s.first}, {"count", s.count}, {"order", s.order}});
  return {{"dim", dim()}, {"streams", streams}};
}

SarParameters SarParameters::from_json(const nlohmann::json& j) {
  std::vector<SarStream> streams;
  for (const auto& s : j.at("streams"))
    streams.push_back({s.at("first").get<std::size_t>(), s.at("count").get<std::size_t>(),
                       s.at("order").get<std::size_t>()});
  return SarParameters(j.at("dim").get<std::size_t>(), streams);
}

SarParameters default_sar(std::size_t mgc_dims, std::size_t bap_dims) {
  return SarParameters(mgc_dims + bap_dims, {{0, mgc_dims, 1}, {mgc_dims, bap_dims, 0}});
}

Matrix sar_mean(const Matrix& h, const SarParameters& sar, const Matrix& a) {
  if (h.cols() != sar.dim() || a.cols() != sar.dim() || h.rows() != a.rows())
    throw ShapeError("sar", "h, a and AR parameters disagree on shape");
  Matrix m = h;
  const std::size_t N = h.rows();
  for (std::size_t s = 0; s < sar.streams().size(); ++s) {
    const auto& st = sar.streams()[s];
    const Matrix& beta = sar.beta(s).value;
    for (std::size_t n = 0; n < N; ++n)
      for (std::size_t k = 1; k <= st.order && k <= n; ++k)
        for (std::size_t j = 0; j < st.count; ++j) m(n, st.first + j) += beta(k - 1, j) * a(n - k, st.first + j);
  }
  for (std::size_t n = 0; n < N; ++n)
    for (std::size_t j = 0; j < m.cols(); ++j) m(n, j) += sar.gamma.value(0, j);
  return m;
}

double sar_nll_from(const Matrix& h, const SarParameters& sar, const Matrix& a) {
  return nn::gaussian_nll(sar_mean(h, sar, a), a).loss;
}

double sar_nll(nn::Network& net, const SarParameters& sar, const Matrix& l, const Matrix& a) {
  check_pair(net, l, a, "sar_nll");
  return sar_nll_from(net.forward(l), sar, a);
}

double sar_nll_backward(nn::Network& net, SarParameters& sar, const Matrix& l, const Matrix& a, double weight) {
  check_pair(net, l, a, "sar_nll");
  auto r = nn::gaussian_nll(sar_mean(net.forward(l), sar, a), a);
  for (double& g : r.grad.values()) g *= weight;
  const std::size_t N = a.rows();
  for (std::size_t s = 0; s < sar.streams().size(); ++s) {
    const auto& st = sar.streams()[s];
    Matrix& gb = sar.beta(s).grad;
    for (std::size_t n = 0; n < N; ++n)
      for (std::size_t k = 1; k <= st.order && k <= n; ++k)
        for (std::size_t j = 0; j < st.count; ++j) gb(k - 1, j) += r.grad(n, st.first + j) * a(n - k, st.first + j);
  }
  for (std::size_t n = 0; n < N; ++n)
    for (std::size_t j = 0; j < a.cols(); ++j) sar.gamma.grad(0, j) += r.grad(n, j);
  net.backward(r.grad);
  return r.loss;
}

Matrix sar_generate_from(const Matrix& h, const SarParameters& sar) {
  if (h.cols() != sar.dim()) throw ShapeError("sar_generate", "h has the wrong dimension");
  Matrix out = h;
  const std::size_t N = h.rows();
  for (std::size_t n = 0; n < N; ++n) {
    for (std::size_t s = 0; s < sar.streams().size(); ++s) {
      const auto& st = sar.streams()[s];
      const Matrix& beta = sar.beta(s).value;
      for (std::size_t k = 1; k <= st.order && k <= n; ++k)
        for (std::size_t j = 0; j < st.count; ++j)
          out(n, st.first + j) += beta(k - 1, j) * out(n - k, st.first + j);
    }
    for (std::size_t j = 0; j < out.cols(); ++j) out(n, j) += sar.gamma.value(0, j);
  }
  return out;
}

Matrix sar_generate(nn::Network& net, const SarParameters& sar, const Matrix& l) {
  return sar_generate_from(net.forward(l), sar);
}

}  // namespace vb::acoustic
