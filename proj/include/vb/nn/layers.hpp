// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "vb/common/matrix.hpp"
#include "vb/common/rng.hpp"
#include "vb/nn/tensor.hpp"

// Sequence layers. Every layer maps a T x in matrix (rows are time steps) to
// a T x out matrix, caches what its backward pass needs, and accumulates
// parameter gradients into its Tensors on backward.

namespace vb::nn {

enum class LayerKind {
  linear,
  ff_tanh,
  uni_recurrent,
  bi_recurrent,
  conv1d,
  dilated_causal_block,
  softmax_head,
  gaussian_head,
};

LayerKind parse_layer_kind(const std::string& s);
std::string to_string(LayerKind k);

/// Architecture descriptor of one layer.
///
/// Field use by kind:
///   linear, ff_tanh, softmax_head, gaussian_head: in, out
///   uni_recurrent, bi_recurrent: in, out = hidden size (bi emits 2 * out)
///   conv1d: in, out, width (odd; centred, zero padded)
///   dilated_causal_block: in = out = residual channels, skip, dilation,
///     cond (conditioning dim, 0 for none), upsample (samples per cond row)
struct LayerSpec {
  LayerKind kind = LayerKind::linear;
  std::size_t in = 0;
  std::size_t out = 0;
  std::size_t width = 1;
  std::size_t dilation = 1;
  std::size_t skip = 0;
  std::size_t cond = 0;
  std::size_t upsample = 1;

  /// Output feature count of the layer.
  std::size_t output_dim() const;
  void validate() const;
  nlohmann::json to_json() const;
  static LayerSpec from_json(const nlohmann::json& j);
};

class Layer {
 public:
  explicit Layer(LayerSpec spec) : spec_(spec) {}
  virtual ~Layer() = default;
  Layer(const Layer&) = delete;
  Layer& operator=(const Layer&) = delete;

  const LayerSpec& spec() const noexcept { return spec_; }
  std::size_t input_dim() const noexcept { return spec_.in; }
  std::size_t output_dim() const { return spec_.output_dim(); }

  Matrix forward(const Matrix& x);
  /// dy is dL/d(output); returns dL/d(input). Needs a preceding forward.
  Matrix backward(const Matrix& dy);

  virtual ParamList params() = 0;
  /// Fresh uniform(+-1/sqrt(fan_in)) initialisation.
  virtual void init(Rng& rng) = 0;

 protected:
  virtual Matrix do_forward(const Matrix& x) = 0;
  virtual Matrix do_backward(const Matrix& dy) = 0;
  std::string where() const;

  LayerSpec spec_;
  bool cached_ = false;
};

class Linear : public Layer {
 public:
  explicit Linear(LayerSpec spec);
  ParamList params() override { return {&w_, &b_}; }
  void init(Rng& rng) override;
  Tensor& weight() { return w_; }
  Tensor& bias() { return b_; }

 protected:
  Matrix do_forward(const Matrix& x) override;
  Matrix do_backward(const Matrix& dy) override;

  Tensor w_, b_;
  Matrix x_;
};

/// y = tanh(x W + b).
class FeedForwardTanh : public Linear {
 public:
  using Linear::Linear;

 protected:
  Matrix do_forward(const Matrix& x) override;
  Matrix do_backward(const Matrix& dy) override;

 private:
  Matrix y_;
};

/// Linear projection followed by log-softmax over the output columns.
class SoftmaxHead : public Linear {
 public:
  using Linear::Linear;

 protected:
  Matrix do_forward(const Matrix& x) override;
  Matrix do_backward(const Matrix& dy) override;

 private:
  Matrix logp_;
};

/// Mean of an identity-covariance Gaussian; a plain linear projection whose
/// loss lives in gaussian_nll.
class GaussianHead : public Linear {
 public:
  using Linear::Linear;
};

/// Single-direction LSTM. Gate order i, f, g, o; forget-gate bias starts at 1.
class Lstm {
 public:
  Lstm(std::string prefix, std::size_t in, std::size_t hidden, bool reverse);
  ParamList params() { return {&wx_, &wh_, &b_}; }
  void init(Rng& rng);
  Matrix forward(const Matrix& x);
  /// Accumulates parameter gradients, returns dL/dx.
  Matrix backward(const Matrix& dy);

 private:
  std::size_t in_, hidden_;
  bool reverse_;
  Tensor wx_, wh_, b_;
  Matrix x_, gates_, cell_, hid_;
};

class UniRecurrent : public Layer {
 public:
  explicit UniRecurrent(LayerSpec spec);
  ParamList params() override { return cell_.params(); }
  void init(Rng& rng) override { cell_.init(rng); }

 protected:
  Matrix do_forward(const Matrix& x) override { return cell_.forward(x); }
  Matrix do_backward(const Matrix& dy) override { return cell_.backward(dy); }

 private:
  Lstm cell_;
};

/// Forward and time-reversed LSTMs over the same input; output [fwd | bwd].
class BiRecurrent : public Layer {
 public:
  explicit BiRecurrent(LayerSpec spec);
  ParamList params() override;
  void init(Rng& rng) override;

 protected:
  Matrix do_forward(const Matrix& x) override;
  Matrix do_backward(const Matrix& dy) override;

 private:
  Lstm fwd_, bwd_;
};

/// Centred 1-D convolution over time with zero padding; T in, T out.
class Conv1d : public Layer {
 public:
  explicit Conv1d(LayerSpec spec);
  ParamList params() override { return {&w_, &b_}; }
  void init(Rng& rng) override;

 protected:
  Matrix do_forward(const Matrix& x) override;
  Matrix do_backward(const Matrix& dy) override;

 private:
  Matrix im2col(const Matrix& x) const;
  Tensor w_, b_;
  Matrix cols_;
};

/// Gated residual block with a kernel-2 dilated causal convolution:
///   [f | g] = h[t] W0 + h[t-d] W1 + c[t / upsample] Wc + b
///   z = tanh(f) * sigmoid(g)
///   res = h + z Wr,  skip = z Ws
/// The output row is [res | skip]. Conditioning rows are set per sequence
/// with set_conditioning and their gradient is read back with
/// cond_gradient after backward.
class DilatedCausalBlock : public Layer {
 public:
  explicit DilatedCausalBlock(LayerSpec spec);
  ParamList params() override;
  void init(Rng& rng) override;

  void set_conditioning(const Matrix& cond);
  const Matrix& cond_gradient() const { return dcond_; }

  /// Incremental generation: reset the history, then feed one sample at a
  /// time. `cond_proj` is the row of conditioning_projection() for the
  /// sample's frame (empty when the block has no conditioning).
  void reset_state();
  void step(std::span<const double> h, std::span<const double> cond_proj, std::span<double> out);
  /// cond * Wc for every conditioning row (rows x 2C).
  Matrix conditioning_projection(const Matrix& cond) const;

  Tensor& gate_bias() { return b_; }

 protected:
  Matrix do_forward(const Matrix& x) override;
  Matrix do_backward(const Matrix& dy) override;

 private:
  std::size_t C_, S_, d_;
  Tensor w0_, w1_, wc_, b_, wr_, ws_;
  Matrix cond_, h_, z_, tf_, sg_;
  Matrix dcond_;
  std::vector<double> history_;  // ring buffer, d_ rows of C_
  std::size_t history_pos_ = 0;
  std::vector<double> pre_, zt_;
};

std::unique_ptr<Layer> make_layer(const LayerSpec& spec);

}  // namespace vb::nn
