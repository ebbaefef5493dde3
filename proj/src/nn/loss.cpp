// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#include "vb/nn/loss.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "vb/common/error.hpp"

namespace vb::nn {

LossResult gaussian_nll(const Matrix& mean, const Matrix& target) {
  if (mean.rows() != target.rows() || mean.cols() != target.cols())
    throw ShapeError("gaussian_nll", "prediction " + std::to_string(mean.rows()) + "x" +
                                         std::to_string(mean.cols()) + " vs target " +
                                         std::to_string(target.rows()) + "x" + std::to_string(target.cols()));
  const double log_norm = 0.5 * static_cast<double>(mean.cols()) * std::log(2.0 * std::numbers::pi);
  LossResult r{0.0, Matrix(mean.rows(), mean.cols())};
  for (std::size_t t = 0; t < mean.rows(); ++t) {
    double q = 0.0;
    for (std::size_t j = 0; j < mean.cols(); ++j) {
      const double e = mean(t, j) - target(t, j);
      q += e * e;
      r.grad(t, j) = e;
    }
    r.loss += 0.5 * q + log_norm;
  }
  return r;
}

LossResult categorical_nll(const Matrix& logp, const std::vector<int>& target) {
  if (logp.rows() != target.size())
    throw ShapeError("categorical_nll", std::to_string(logp.rows()) + " predictions for " +
                                            std::to_string(target.size()) + " targets");
  LossResult r{0.0, Matrix(logp.rows(), logp.cols())};
  for (std::size_t t = 0; t < logp.rows(); ++t) {
    const int k = target[t];
    if (k < 0 || static_cast<std::size_t>(k) >= logp.cols())
      throw InputError("categorical_nll: class " + std::to_string(k) + " out of range");
    r.loss -= logp(t, k);
    r.grad(t, k) = -1.0;
  }
  return r;
}

LossResult binary_cross_entropy(const Matrix& logits, double label) {
  LossResult r{0.0, Matrix(logits.rows(), logits.cols())};
  for (std::size_t i = 0; i < logits.size(); ++i) {
    const double x = logits.values()[i];
    // -[y log s(x) + (1-y) log(1-s(x))] = max(x,0) - x y + log1p(exp(-|x|))
    r.loss += std::max(x, 0.0) - x * label + std::log1p(std::exp(-std::abs(x)));
    r.grad.values()[i] = 1.0 / (1.0 + std::exp(-x)) - label;
  }
  return r;
}

Matrix softmax(const Matrix& logits) {
  Matrix p = logits;
  for (std::size_t t = 0; t < p.rows(); ++t) {
    auto r = p.row(t);
    const double mx = *std::max_element(r.begin(), r.end());
    double s = 0.0;
    for (double& v : r) s += (v = std::exp(v - mx));
    for (double& v : r) v /= s;
  }
  return p;
}

}  // namespace vb::nn
