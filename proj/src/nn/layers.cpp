// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#include "vb/nn/layers.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "vb/common/error.hpp"
#include "vb/kernels/gemm.hpp"

namespace vb::nn {
namespace {

using kernels::gemm;
using kernels::gemm_nt;
using kernels::gemm_tn;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void init_uniform(Tensor& t, double fan_in, Rng& rng) {
  const double a = 1.0 / std::sqrt(fan_in);
  std::uniform_real_distribution<double> u(-a, a);
  for (double& v : t.value.values()) v = u(rng);
  t.zero_grad();
}

void init_zero(Tensor& t) {
  t.value.fill(0.0);
  t.zero_grad();
}

std::string shape_str(const Matrix& m) { return std::to_string(m.rows()) + "x" + std::to_string(m.cols()); }

}  // namespace

LayerKind parse_layer_kind(const std::string& s) {
  if (s == "linear") return LayerKind::linear;
  if (s == "ff_tanh") return LayerKind::ff_tanh;
  if (s == "uni_recurrent") return LayerKind::uni_recurrent;
  if (s == "bi_recurrent") return LayerKind::bi_recurrent;
  if (s == "conv1d") return LayerKind::conv1d;
  if (s == "dilated_causal_block") return LayerKind::dilated_causal_block;
  if (s == "softmax_head") return LayerKind::softmax_head;
  if (s == "gaussian_head") return LayerKind::gaussian_head;
  throw ConfigError("unknown layer kind '" + s + "'");
}

std::string to_string(LayerKind k) {
  switch (k) {
    case LayerKind::linear: return "linear";
    case LayerKind::ff_tanh: return "ff_tanh";
    case LayerKind::uni_recurrent: return "uni_recurrent";
    case LayerKind::bi_recurrent: return "bi_recurrent";
    case LayerKind::conv1d: return "conv1d";
    case LayerKind::dilated_causal_block: return "dilated_causal_block";
    case LayerKind::softmax_head: return "softmax_head";
    case LayerKind::gaussian_head: return "gaussian_head";
  }
  return "?";
}

std::size_t LayerSpec::output_dim() const {
  switch (kind) {
    case LayerKind::bi_recurrent: return 2 * out;
    case LayerKind::dilated_causal_block: return in + skip;
    default: return out;
  }
}

void LayerSpec::validate() const {
  const std::string k = to_string(kind);
  if (in == 0) throw ConfigError(k + ": input size must be positive");
  if (kind == LayerKind::dilated_causal_block) {
    if (out != in) throw ConfigError(k + ": residual block needs out == in");
    if (skip == 0) throw ConfigError(k + ": skip size must be positive");
    if (dilation < 1) throw ConfigError(k + ": dilation must be >= 1");
    if (upsample < 1) throw ConfigError(k + ": upsample must be >= 1");
    return;
  }
  if (out == 0) throw ConfigError(k + ": output size must be positive");
  if (kind == LayerKind::conv1d && (width == 0 || width % 2 == 0))
    throw ConfigError(k + ": width must be odd");
}

nlohmann::json LayerSpec::to_json() const {
  nlohmann::json j{{"kind", to_string(kind)}, {"in", in}, {"out", out}};
  if (kind == LayerKind::conv1d) j["width"] = width;
  if (kind == LayerKind::dilated_causal_block) {
    j["dilation"] = dilation;
    j["skip"] = skip;
    j["cond"] = cond;
    j["upsample"] = upsample;
  }
  return j;
}

LayerSpec LayerSpec::from_json(const nlohmann::json& j) {
  LayerSpec s;
  s.kind = parse_layer_kind(j.at("kind").get<std::string>());
  s.in = j.at("in").get<std::size_t>();
  s.out = j.at("out").get<std::size_t>();
  s.width = j.value("width", std::size_t{1});
  s.dilation = j.value("dilation", std::size_t{1});
  s.skip = j.value("skip", std::size_t{0});
  s.cond = j.value("cond", std::size_t{0});
  s.upsample = j.value("upsample", std::size_t{1});
  s.validate();
  return s;
}

// ---------------------------------------------------------------------------

std::string Layer::where() const { return to_string(spec_.kind) + "(" + std::to_string(spec_.in) + "->" +
                                          std::to_string(output_dim()) + ")"; }

Matrix Layer::forward(const Matrix& x) {
  if (x.cols() != spec_.in)
    throw ShapeError(where(), "input has " + std::to_string(x.cols()) + " features, expected " +
                                  std::to_string(spec_.in));
  Matrix y = do_forward(x);
  cached_ = true;
  check_finite(y, where());
  return y;
}

Matrix Layer::backward(const Matrix& dy) {
  if (!cached_) throw Error(where() + ": backward without forward");
  if (dy.cols() != output_dim())
    throw ShapeError(where(), "output gradient is " + shape_str(dy));
  Matrix dx = do_backward(dy);
  check_finite(dx, where());
  return dx;
}

// ---------------------------------------------------------------------------

Linear::Linear(LayerSpec spec) : Layer(spec), w_("w", spec.in, spec.out), b_("b", 1, spec.out) {
  spec_.validate();
}

void Linear::init(Rng& rng) {
  init_uniform(w_, static_cast<double>(spec_.in), rng);
  init_zero(b_);
}

Matrix Linear::do_forward(const Matrix& x) {
  x_ = x;
  Matrix y;
  gemm(x, w_.value, y);
  kernels::add_row_bias(y, b_.value);
  return y;
}

Matrix Linear::do_backward(const Matrix& dy) {
  if (dy.rows() != x_.rows()) throw ShapeError(where(), "output gradient is " + shape_str(dy));
  gemm_tn(x_, dy, w_.grad, true);
  kernels::accumulate_col_sums(dy, b_.grad);
  Matrix dx;
  gemm_nt(dy, w_.value, dx);
  return dx;
}

Matrix FeedForwardTanh::do_forward(const Matrix& x) {
  y_ = Linear::do_forward(x);
  for (double& v : y_.values()) v = std::tanh(v);
  return y_;
}

Matrix FeedForwardTanh::do_backward(const Matrix& dy) {
  Matrix dz = dy;
  for (std::size_t i = 0; i < dz.size(); ++i) {
    const double y = y_.values()[i];
    dz.values()[i] *= 1.0 - y * y;
  }
  return Linear::do_backward(dz);
}

Matrix SoftmaxHead::do_forward(const Matrix& x) {
  logp_ = Linear::do_forward(x);
  for (std::size_t t = 0; t < logp_.rows(); ++t) {
    auto r = logp_.row(t);
    const double mx = *std::max_element(r.begin(), r.end());
    double s = 0.0;
    for (double v : r) s += std::exp(v - mx);
    const double lse = mx + std::log(s);
    for (double& v : r) v -= lse;
  }
  return logp_;
}

Matrix SoftmaxHead::do_backward(const Matrix& dy) {
  // d logp_j / d z_k = delta_jk - p_k
  Matrix dz(dy.rows(), dy.cols());
  for (std::size_t t = 0; t < dy.rows(); ++t) {
    auto g = dy.row(t);
    auto lp = logp_.row(t);
    double total = 0.0;
    for (double v : g) total += v;
    auto o = dz.row(t);
    for (std::size_t k = 0; k < g.size(); ++k) o[k] = g[k] - std::exp(lp[k]) * total;
  }
  return Linear::do_backward(dz);
}

// ---------------------------------------------------------------------------

Lstm::Lstm(std::string prefix, std::size_t in, std::size_t hidden, bool reverse)
    : in_(in),
      hidden_(hidden),
      reverse_(reverse),
      wx_(prefix + "wx", in, 4 * hidden),
      wh_(prefix + "wh", hidden, 4 * hidden),
      b_(prefix + "b", 1, 4 * hidden) {}

void Lstm::init(Rng& rng) {
  init_uniform(wx_, static_cast<double>(in_), rng);
  init_uniform(wh_, static_cast<double>(hidden_), rng);
  init_zero(b_);
  for (std::size_t j = hidden_; j < 2 * hidden_; ++j) b_.value(0, j) = 1.0;
}

Matrix Lstm::forward(const Matrix& x) {
  const std::size_t T = x.rows(), H = hidden_;
  x_ = x;
  gemm(x, wx_.value, gates_);
  kernels::add_row_bias(gates_, b_.value);
  cell_.resize(T, H);
  hid_.resize(T, H);
  std::vector<double> h_prev(H, 0.0), c_prev(H, 0.0);
  const double* Wh = wh_.value.data();
  for (std::size_t s = 0; s < T; ++s) {
    const std::size_t t = reverse_ ? T - 1 - s : s;
    auto a = gates_.row(t);
    for (std::size_t p = 0; p < H; ++p) {
      const double hv = h_prev[p];
      const double* w = Wh + p * 4 * H;
      for (std::size_t j = 0; j < 4 * H; ++j) a[j] += hv * w[j];
    }
    auto c = cell_.row(t);
    auto h = hid_.row(t);
    for (std::size_t j = 0; j < H; ++j) {
      const double i = sigmoid(a[j]);
      const double f = sigmoid(a[H + j]);
      const double g = std::tanh(a[2 * H + j]);
      const double o = sigmoid(a[3 * H + j]);
      a[j] = i;
      a[H + j] = f;
      a[2 * H + j] = g;
      a[3 * H + j] = o;
      c[j] = f * c_prev[j] + i * g;
      h[j] = o * std::tanh(c[j]);
    }
    std::copy(c.begin(), c.end(), c_prev.begin());
    std::copy(h.begin(), h.end(), h_prev.begin());
  }
  return hid_;
}

Matrix Lstm::backward(const Matrix& dy) {
  const std::size_t T = x_.rows(), H = hidden_;
  if (dy.rows() != T || dy.cols() != H) throw ShapeError("lstm", "output gradient is " + shape_str(dy));
  Matrix da(T, 4 * H);
  Matrix h_prev_all(T, H);
  std::vector<double> dh_next(H, 0.0), dc_next(H, 0.0);
  const double* Wh = wh_.value.data();
  for (std::size_t s = T; s-- > 0;) {
    const std::size_t t = reverse_ ? T - 1 - s : s;
    const bool first = s == 0;
    const std::size_t tp = reverse_ ? t + 1 : t - 1;  // previous step's time index
    auto g = gates_.row(t);
    auto c = cell_.row(t);
    auto d = da.row(t);
    for (std::size_t j = 0; j < H; ++j) {
      const double i = g[j], f = g[H + j], gg = g[2 * H + j], o = g[3 * H + j];
      const double cp = first ? 0.0 : cell_(tp, j);
      const double tc = std::tanh(c[j]);
      const double dh = dy(t, j) + dh_next[j];
      const double dc = dh * o * (1.0 - tc * tc) + dc_next[j];
      d[j] = dc * gg * i * (1.0 - i);
      d[H + j] = dc * cp * f * (1.0 - f);
      d[2 * H + j] = dc * i * (1.0 - gg * gg);
      d[3 * H + j] = dh * tc * o * (1.0 - o);
      dc_next[j] = dc * f;
      if (!first) h_prev_all(t, j) = hid_(tp, j);
    }
    for (std::size_t p = 0; p < H; ++p) {
      const double* w = Wh + p * 4 * H;
      double acc = 0.0;
      for (std::size_t j = 0; j < 4 * H; ++j) acc += d[j] * w[j];
      dh_next[p] = acc;
    }
  }
  gemm_tn(x_, da, wx_.grad, true);
  gemm_tn(h_prev_all, da, wh_.grad, true);
  kernels::accumulate_col_sums(da, b_.grad);
  Matrix dx;
  gemm_nt(da, wx_.value, dx);
  return dx;
}

UniRecurrent::UniRecurrent(LayerSpec spec) : Layer(spec), cell_("", spec.in, spec.out, false) {
  spec_.validate();
}

BiRecurrent::BiRecurrent(LayerSpec spec)
    : Layer(spec), fwd_("fwd.", spec.in, spec.out, false), bwd_("bwd.", spec.in, spec.out, true) {
  spec_.validate();
}

ParamList BiRecurrent::params() {
  ParamList p = fwd_.params();
  for (Tensor* t : bwd_.params()) p.push_back(t);
  return p;
}

void BiRecurrent::init(Rng& rng) {
  fwd_.init(rng);
  bwd_.init(rng);
}

Matrix BiRecurrent::do_forward(const Matrix& x) {
  Matrix y(x.rows(), 2 * spec_.out);
  y.set_col_block(0, fwd_.forward(x));
  y.set_col_block(spec_.out, bwd_.forward(x));
  return y;
}

Matrix BiRecurrent::do_backward(const Matrix& dy) {
  Matrix dx = fwd_.backward(dy.col_block(0, spec_.out));
  const Matrix db = bwd_.backward(dy.col_block(spec_.out, spec_.out));
  for (std::size_t i = 0; i < dx.size(); ++i) dx.values()[i] += db.values()[i];
  return dx;
}

// ---------------------------------------------------------------------------

Conv1d::Conv1d(LayerSpec spec)
    : Layer(spec), w_("w", spec.width * spec.in, spec.out), b_("b", 1, spec.out) {
  spec_.validate();
}

void Conv1d::init(Rng& rng) {
  init_uniform(w_, static_cast<double>(spec_.width * spec_.in), rng);
  init_zero(b_);
}

Matrix Conv1d::im2col(const Matrix& x) const {
  const std::size_t T = x.rows(), C = spec_.in, W = spec_.width;
  const long half = static_cast<long>(W / 2);
  Matrix cols(T, W * C);
  for (std::size_t t = 0; t < T; ++t)
    for (std::size_t k = 0; k < W; ++k) {
      const long src = static_cast<long>(t) + static_cast<long>(k) - half;
      if (src < 0 || src >= static_cast<long>(T)) continue;
      std::copy_n(x.data() + src * C, C, cols.data() + t * W * C + k * C);
    }
  return cols;
}

Matrix Conv1d::do_forward(const Matrix& x) {
  cols_ = im2col(x);
  Matrix y;
  gemm(cols_, w_.value, y);
  kernels::add_row_bias(y, b_.value);
  return y;
}

Matrix Conv1d::do_backward(const Matrix& dy) {
  const std::size_t T = cols_.rows(), C = spec_.in, W = spec_.width;
  if (dy.rows() != T) throw ShapeError(where(), "output gradient is " + shape_str(dy));
  gemm_tn(cols_, dy, w_.grad, true);
  kernels::accumulate_col_sums(dy, b_.grad);
  Matrix dcols;
  gemm_nt(dy, w_.value, dcols);
  Matrix dx(T, C);
  const long half = static_cast<long>(W / 2);
  for (std::size_t t = 0; t < T; ++t)
    for (std::size_t k = 0; k < W; ++k) {
      const long dst = static_cast<long>(t) + static_cast<long>(k) - half;
      if (dst < 0 || dst >= static_cast<long>(T)) continue;
      const double* src = dcols.data() + t * W * C + k * C;
      double* out = dx.data() + dst * C;
      for (std::size_t c = 0; c < C; ++c) out[c] += src[c];
    }
  return dx;
}

// ---------------------------------------------------------------------------

DilatedCausalBlock::DilatedCausalBlock(LayerSpec spec)
    : Layer(spec),
      C_(spec.in),
      S_(spec.skip),
      d_(spec.dilation),
      w0_("w0", spec.in, 2 * spec.in),
      w1_("w1", spec.in, 2 * spec.in),
      wc_("wc", spec.cond, 2 * spec.in),
      b_("b", 1, 2 * spec.in),
      wr_("wr", spec.in, spec.in),
      ws_("ws", spec.in, spec.skip) {
  spec_.validate();
  reset_state();
}

ParamList DilatedCausalBlock::params() {
  if (spec_.cond == 0) return {&w0_, &w1_, &b_, &wr_, &ws_};
  return {&w0_, &w1_, &wc_, &b_, &wr_, &ws_};
}

void DilatedCausalBlock::init(Rng& rng) {
  init_uniform(w0_, 2.0 * C_, rng);
  init_uniform(w1_, 2.0 * C_, rng);
  if (spec_.cond > 0) init_uniform(wc_, static_cast<double>(spec_.cond), rng);
  init_zero(b_);
  init_uniform(wr_, static_cast<double>(C_), rng);
  init_uniform(ws_, static_cast<double>(C_), rng);
}

void DilatedCausalBlock::set_conditioning(const Matrix& cond) {
  if (spec_.cond == 0) throw ConfigError(where() + ": block has no conditioning input");
  if (cond.cols() != spec_.cond)
    throw ShapeError(where(), "conditioning has " + std::to_string(cond.cols()) + " features, expected " +
                                  std::to_string(spec_.cond));
  cond_ = cond;
}

Matrix DilatedCausalBlock::conditioning_projection(const Matrix& cond) const {
  Matrix cp;
  gemm(cond, wc_.value, cp);
  return cp;
}

Matrix DilatedCausalBlock::do_forward(const Matrix& x) {
  const std::size_t T = x.rows();
  h_ = x;
  Matrix shifted(T, C_);
  if (T > d_) std::copy_n(x.data(), (T - d_) * C_, shifted.data() + d_ * C_);
  Matrix pre;
  gemm(x, w0_.value, pre);
  gemm(shifted, w1_.value, pre, true);
  kernels::add_row_bias(pre, b_.value);
  if (spec_.cond > 0) {
    const std::size_t U = spec_.upsample;
    if (cond_.rows() * U < T)
      throw ShapeError(where(), std::to_string(cond_.rows()) + " conditioning rows x " + std::to_string(U) +
                                    " cannot cover " + std::to_string(T) + " steps");
    const Matrix cp = conditioning_projection(cond_);
    for (std::size_t t = 0; t < T; ++t) {
      auto r = pre.row(t);
      auto c = cp.row(t / U);
      for (std::size_t j = 0; j < 2 * C_; ++j) r[j] += c[j];
    }
  }
  tf_.resize(T, C_);
  sg_.resize(T, C_);
  z_.resize(T, C_);
  for (std::size_t t = 0; t < T; ++t) {
    auto p = pre.row(t);
    for (std::size_t j = 0; j < C_; ++j) {
      const double a = std::tanh(p[j]);
      const double b = sigmoid(p[C_ + j]);
      tf_(t, j) = a;
      sg_(t, j) = b;
      z_(t, j) = a * b;
    }
  }
  Matrix res = x;
  gemm(z_, wr_.value, res, true);
  Matrix skip;
  gemm(z_, ws_.value, skip);
  Matrix out(T, C_ + S_);
  out.set_col_block(0, res);
  out.set_col_block(C_, skip);
  return out;
}

Matrix DilatedCausalBlock::do_backward(const Matrix& dy) {
  const std::size_t T = h_.rows();
  if (dy.rows() != T) throw ShapeError(where(), "output gradient is " + shape_str(dy));
  const Matrix dres = dy.col_block(0, C_);
  const Matrix dskip = dy.col_block(C_, S_);
  gemm_tn(z_, dres, wr_.grad, true);
  gemm_tn(z_, dskip, ws_.grad, true);
  Matrix dz;
  gemm_nt(dres, wr_.value, dz);
  gemm_nt(dskip, ws_.value, dz, true);
  Matrix dpre(T, 2 * C_);
  for (std::size_t t = 0; t < T; ++t)
    for (std::size_t j = 0; j < C_; ++j) {
      const double a = tf_(t, j), b = sg_(t, j), g = dz(t, j);
      dpre(t, j) = g * b * (1.0 - a * a);
      dpre(t, C_ + j) = g * a * b * (1.0 - b);
    }
  Matrix shifted(T, C_);
  if (T > d_) std::copy_n(h_.data(), (T - d_) * C_, shifted.data() + d_ * C_);
  gemm_tn(h_, dpre, w0_.grad, true);
  gemm_tn(shifted, dpre, w1_.grad, true);
  kernels::accumulate_col_sums(dpre, b_.grad);
  if (spec_.cond > 0) {
    const std::size_t U = spec_.upsample;
    Matrix dframe(cond_.rows(), 2 * C_);
    for (std::size_t t = 0; t < T; ++t) {
      auto src = dpre.row(t);
      auto dst = dframe.row(t / U);
      for (std::size_t j = 0; j < 2 * C_; ++j) dst[j] += src[j];
    }
    gemm_tn(cond_, dframe, wc_.grad, true);
    gemm_nt(dframe, wc_.value, dcond_);
  }
  Matrix dx = dres;
  gemm_nt(dpre, w0_.value, dx, true);
  Matrix dshift;
  gemm_nt(dpre, w1_.value, dshift);
  for (std::size_t t = d_; t < T; ++t) {
    auto src = dshift.row(t);
    auto dst = dx.row(t - d_);
    for (std::size_t j = 0; j < C_; ++j) dst[j] += src[j];
  }
  return dx;
}

void DilatedCausalBlock::reset_state() {
  history_.assign(d_ * C_, 0.0);
  history_pos_ = 0;
  pre_.assign(2 * C_, 0.0);
  zt_.assign(C_, 0.0);
}

void DilatedCausalBlock::step(std::span<const double> h, std::span<const double> cond_proj,
                              std::span<double> out) {
  if (h.size() != C_ || out.size() != C_ + S_ || (spec_.cond > 0 && cond_proj.size() != 2 * C_))
    throw ShapeError(where(), "step buffers have the wrong size");
  const double* past = history_.data() + history_pos_ * C_;
  std::copy(b_.value.values().begin(), b_.value.values().end(), pre_.begin());
  if (spec_.cond > 0)
    for (std::size_t j = 0; j < 2 * C_; ++j) pre_[j] += cond_proj[j];
  for (std::size_t p = 0; p < C_; ++p) {
    const double a = h[p], b = past[p];
    const double* w0 = w0_.value.data() + p * 2 * C_;
    const double* w1 = w1_.value.data() + p * 2 * C_;
    for (std::size_t j = 0; j < 2 * C_; ++j) pre_[j] += a * w0[j];
    for (std::size_t j = 0; j < 2 * C_; ++j) pre_[j] += b * w1[j];
  }
  for (std::size_t j = 0; j < C_; ++j) zt_[j] = std::tanh(pre_[j]) * sigmoid(pre_[C_ + j]);
  std::copy(h.begin(), h.end(), out.begin());
  std::fill(out.begin() + C_, out.end(), 0.0);
  for (std::size_t p = 0; p < C_; ++p) {
    const double z = zt_[p];
    const double* wr = wr_.value.data() + p * C_;
    const double* ws = ws_.value.data() + p * S_;
    for (std::size_t j = 0; j < C_; ++j) out[j] += z * wr[j];
    for (std::size_t j = 0; j < S_; ++j) out[C_ + j] += z * ws[j];
  }
  std::copy(h.begin(), h.end(), history_.begin() + history_pos_ * C_);
  history_pos_ = (history_pos_ + 1) % d_;
}

// ---------------------------------------------------------------------------

std::unique_ptr<Layer> make_layer(const LayerSpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case LayerKind::linear: return std::make_unique<Linear>(spec);
    case LayerKind::ff_tanh: return std::make_unique<FeedForwardTanh>(spec);
    case LayerKind::uni_recurrent: return std::make_unique<UniRecurrent>(spec);
    case LayerKind::bi_recurrent: return std::make_unique<BiRecurrent>(spec);
    case LayerKind::conv1d: return std::make_unique<Conv1d>(spec);
    case LayerKind::dilated_causal_block: return std::make_unique<DilatedCausalBlock>(spec);
    case LayerKind::softmax_head: return std::make_unique<SoftmaxHead>(spec);
    case LayerKind::gaussian_head: return std::make_unique<GaussianHead>(spec);
  }
  throw ConfigError("unknown layer kind");
}

}  // namespace vb::nn
