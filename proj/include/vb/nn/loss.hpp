// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "vb/common/matrix.hpp"

namespace vb::nn {

struct LossResult {
  double loss = 0.0;
  Matrix grad;  // dL/d(prediction), same shape as the prediction
};

/// Sum over frames of 0.5 ||target - mean||^2 + (d/2) ln(2 pi).
LossResult gaussian_nll(const Matrix& mean, const Matrix& target);

/// Sum over rows of -logp[t, target[t]]. logp is a log-softmax output.
LossResult categorical_nll(const Matrix& logp, const std::vector<int>& target);

/// Per-row binary cross-entropy of logits against a constant label, summed;
/// uses the log1p(exp(-|x|)) form.
LossResult binary_cross_entropy(const Matrix& logits, double label);

/// Row-wise softmax of logits.
Matrix softmax(const Matrix& logits);

}  // namespace vb::nn
