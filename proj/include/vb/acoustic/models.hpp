// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "json.hpp"
#include "vb/common/matrix.hpp"
#include "vb/nn/network.hpp"
#include "vb/nn/tensor.hpp"

// Frame-level acoustic models mapping linguistic features l (N x D) to
// acoustic features a (N x d). All likelihoods are identity-covariance
// Gaussians; the losses are summed over frames.

namespace vb::acoustic {

struct AcousticNetConfig {
  std::size_t ff_size = 128;
  std::size_t ff_layers = 2;
  std::size_t bi_size = 64;
  std::size_t uni_size = 64;

  nlohmann::json to_json() const;
  static AcousticNetConfig from_json(const nlohmann::json& j);
};

/// ff_tanh x ff_layers -> bi_recurrent -> uni_recurrent -> gaussian_head.
nn::Network make_acoustic_network(std::size_t in_dim, std::size_t out_dim, const AcousticNetConfig& cfg);

/// sum_n 0.5 ||a_n - h_n||^2 + (d/2) ln(2 pi), h = net(l).
double rnn_nll(nn::Network& net, const Matrix& l, const Matrix& a);
/// As rnn_nll, and accumulates `weight` * dLoss/dParams into the network.
double rnn_nll_backward(nn::Network& net, const Matrix& l, const Matrix& a, double weight = 1.0);
/// h = net(l).
Matrix rnn_generate(nn::Network& net, const Matrix& l);

/// Columns [first, first + count) share AR order `order`.
struct SarStream {
  std::size_t first = 0;
  std::size_t count = 0;
  std::size_t order = 0;
};

/// AR parameters: beta_k per stream (order x count) and a bias gamma (1 x d)
/// over all columns. Columns outside every stream only get gamma.
class SarParameters {
 public:
  SarParameters() = default;
  SarParameters(std::size_t dim, std::vector<SarStream> streams);

  std::size_t dim() const noexcept { return gamma.value.cols(); }
  const std::vector<SarStream>& streams() const noexcept { return streams_; }
  nn::Tensor& beta(std::size_t stream) { return beta_.at(stream); }
  const nn::Tensor& beta(std::size_t stream) const { return beta_.at(stream); }
  nn::ParamList params();

  nlohmann::json to_json() const;
  static SarParameters from_json(const nlohmann::json& j);

  nn::Tensor gamma;

 private:
  std::vector<SarStream> streams_;
  std::vector<nn::Tensor> beta_;
};

/// MGC columns [0, mgc) with K = 1, BAP columns [mgc, mgc + bap) with K = 0.
SarParameters default_sar(std::size_t mgc_dims, std::size_t bap_dims);

/// mean_n = h_n + sum_k beta_k * a_{n-k} + gamma, with a_{n-k} = 0 before
/// the first frame.
Matrix sar_mean(const Matrix& h, const SarParameters& sar, const Matrix& a);
double sar_nll_from(const Matrix& h, const SarParameters& sar, const Matrix& a);
double sar_nll(nn::Network& net, const SarParameters& sar, const Matrix& l, const Matrix& a);
/// Loss plus gradients into the network and the SAR tensors.
double sar_nll_backward(nn::Network& net, SarParameters& sar, const Matrix& l, const Matrix& a,
                        double weight = 1.0);

/// Sequential generation a_hat_n = h_n + sum_k beta_k * a_hat_{n-k} + gamma.
Matrix sar_generate_from(const Matrix& h, const SarParameters& sar);
Matrix sar_generate(nn::Network& net, const SarParameters& sar, const Matrix& l);

}  // namespace vb::acoustic
