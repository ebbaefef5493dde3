// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "vb/nn/layers.hpp"

namespace vb::nn {

struct GradientCheckOptions {
  double epsilon = 1e-4;
  /// Relative error is |a - n| / max(|a|, |n|, denominator_floor).
  double denominator_floor = 1e-3;
  std::size_t min_steps = 2;
  std::size_t max_steps = 7;
};

struct GradientCheckEntry {
  std::string name;  // parameter name, "input" or "cond"
  std::size_t checked = 0;
  double max_rel_error = 0.0;
};

struct GradientCheckReport {
  LayerSpec spec;
  std::size_t trials = 0;
  std::vector<GradientCheckEntry> entries;
  double max_rel_error() const;
  nlohmann::json to_json() const;
};

/// Builds the layer, and per trial draws fresh parameters, a random input of
/// random length and a random linear functional of the output as the loss.
/// Every parameter entry, input entry and conditioning entry is compared
/// against a central difference.
GradientCheckReport gradient_check(const LayerSpec& spec, std::size_t trials, std::uint64_t seed,
                                   const GradientCheckOptions& opts = {});

}  // namespace vb::nn
