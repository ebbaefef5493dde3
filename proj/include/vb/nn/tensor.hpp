// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "vb/common/matrix.hpp"

namespace vb::nn {

/// A trainable parameter: value plus a same-shape gradient accumulator.
struct Tensor {
  std::string name;
  Matrix value;
  Matrix grad;

  Tensor() = default;
  Tensor(std::string n, std::size_t rows, std::size_t cols)
      : name(std::move(n)), value(rows, cols), grad(rows, cols) {}

  std::size_t size() const noexcept { return value.size(); }
  void zero_grad() { grad.fill(0.0); }
};

using ParamList = std::vector<Tensor*>;

std::size_t parameter_count(const ParamList& params);
void zero_grad(const ParamList& params);
/// Flattened copies of all values / gradients, in list order.
std::vector<double> flatten_values(const ParamList& params);
std::vector<double> flatten_grads(const ParamList& params);
void assign_values(const ParamList& params, const std::vector<double>& flat);

/// Throws vb::Error naming `where` if `m` holds a NaN or infinity. Disabled
/// globally by set_finite_checks(false).
void check_finite(const Matrix& m, std::string_view where);
void set_finite_checks(bool enabled);
bool finite_checks();

}  // namespace vb::nn
