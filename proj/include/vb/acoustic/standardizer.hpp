// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "json.hpp"
#include "vb/common/matrix.hpp"

namespace vb::acoustic {

/// Per-column z-normalisation fitted on a training set. Columns with zero
/// spread keep unit scale.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;

  static Standardizer fit(const std::vector<Matrix>& data);
  static Standardizer identity(std::size_t dim);

  std::size_t dim() const noexcept { return mean.size(); }
  Matrix apply(const Matrix& x) const;
  Matrix invert(const Matrix& z) const;

  nlohmann::json to_json() const;
  static Standardizer from_json(const nlohmann::json& j);
};

}  // namespace vb::acoustic
