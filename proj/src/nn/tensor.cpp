// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#include "vb/nn/tensor.hpp"

#include <atomic>
#include <cmath>
#include <string>

#include "vb/common/error.hpp"

namespace vb::nn {
namespace {
std::atomic<bool> g_finite_checks{true};
}

std::size_t parameter_count(const ParamList& params) {
  std::size_t n = 0;
  for (const Tensor* p : params) n += p->size();
  return n;
}

void zero_grad(const ParamList& params) {
  for (Tensor* p : params) p->zero_grad();
}

std::vector<double> flatten_values(const ParamList& params) {
  std::vector<double> out;
  out.reserve(parameter_count(params));
  for (const Tensor* p : params) out.insert(out.end(), p->value.values().begin(), p->value.values().end());
  return out;
}

std::vector<double> flatten_grads(const ParamList& params) {
  std::vector<double> out;
  out.reserve(parameter_count(params));
  for (const Tensor* p : params) out.insert(out.end(), p->grad.values().begin(), p->grad.values().end());
  return out;
}

void assign_values(const ParamList& params, const std::vector<double>& flat) {
  if (flat.size() != parameter_count(params))
    throw ShapeError("assign_values", std::to_string(flat.size()) + " values for " +
                                          std::to_string(parameter_count(params)) + " parameters");
  std::size_t k = 0;
  for (Tensor* p : params)
    for (double& v : p->value.values()) v = flat[k++];
}

void check_finite(const Matrix& m, std::string_view where) {
  if (!g_finite_checks.load(std::memory_order_relaxed)) return;
  for (double v : m.values())
    if (!std::isfinite(v)) throw Error(std::string(where) + ": non-finite value");
}

void set_finite_checks(bool enabled) { g_finite_checks.store(enabled); }
bool finite_checks() { return g_finite_checks.load(); }

}  // namespace vb::nn
