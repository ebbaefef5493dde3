// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#include "vb/acoustic/standardizer.hpp"

#include <cmath>
#include <string>

#include "vb/common/error.hpp"

namespace vb::acoustic {

Standardizer Standardizer::fit(const std::vector<Matrix>& data) {
  if (data.empty()) throw InputError("standardizer: no data");
  const std::size_t d = data.front().cols();
  std::vector<double> sum(d, 0.0), sq(d, 0.0);
  double n = 0.0;
  for (const auto& m : data) {
    if (m.cols() != d) throw ShapeError("standardizer", "inconsistent feature dimension");
    for (std::size_t t = 0; t < m.rows(); ++t)
      for (std::size_t j = 0; j < d; ++j) sum[j] += m(t, j);
    n += static_cast<double>(m.rows());
  }
  if (n == 0.0) throw InputError("standardizer: no frames");
  Standardizer s{std::vector<double>(d), std::vector<double>(d, 1.0)};
  for (std::size_t j = 0; j < d; ++j) s.mean[j] = sum[j] / n;
  for (const auto& m : data)
    for (std::size_t t = 0; t < m.rows(); ++t)
      for (std::size_t j = 0; j < d; ++j) sq[j] += (m(t, j) - s.mean[j]) * (m(t, j) - s.mean[j]);
  for (std::size_t j = 0; j < d; ++j) {
    const double sd = std::sqrt(sq[j] / n);
    if (sd > 1e-8) s.scale[j] = sd;
  }
  return s;
}

Standardizer Standardizer::identity(std::size_t dim) {
  return {std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0)};
}

Matrix Standardizer::apply(const Matrix& x) const {
  if (x.cols() != dim()) throw ShapeError("standardizer", "expected " + std::to_string(dim()) + " columns");
  Matrix z = x;
  for (std::size_t t = 0; t < z.rows(); ++t)
    for (std::size_t j = 0; j < z.cols(); ++j) z(t, j) = (x(t, j) - mean[j]) / scale[j];
  return z;
}

Matrix Standardizer::invert(const Matrix& z) const {
  if (z.cols() != dim()) throw ShapeError("standardizer", "expected " + std::to_string(dim()) + " columns");
  Matrix x = z;
  for (std::size_t t = 0; t < x.rows(); ++t)
    for (std::size_t j = 0; j < x.cols(); ++j) x(t, j) = z(t, j) * scale[j] + mean[j];
  return x;
}

nlohmann::json Standardizer::to_json() const { return {{"mean", mean}, {"scale", scale}}; }

Standardizer Standardizer::from_json(const nlohmann::json& j) {
  Standardizer s{j.at("mean").get<std::vector<double>>(), j.at("scale").get<std::vector<double>>()};
  if (s.mean.size() != s.scale.size()) throw ConfigError("standardizer: mean/scale size mismatch");
  return s;
}

}  // namespace vb::acoustic
