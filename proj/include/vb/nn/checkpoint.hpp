// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "vb/nn/tensor.hpp"

// File layout (little-endian):
//   "VBCK", u32 version, u64 arch length, arch JSON bytes,
//   u64 parameter count, parameter count x f32.
// Parameters are written in ParamList order and narrowed to float32, so a
// loaded model holds float32-representable values and re-saving it
// reproduces the file byte for byte.

namespace vb::nn {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  nlohmann::json arch;
  std::vector<float> params;
};

std::vector<std::uint8_t> encode_checkpoint(const nlohmann::json& arch, const ParamList& params);
Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes);

void save_checkpoint(const std::filesystem::path& path, const nlohmann::json& arch,
                     const ParamList& params);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Copies checkpoint parameters into `params`; throws ShapeError if the
/// counts differ.
void restore_params(const Checkpoint& ck, const ParamList& params);

}  // namespace vb::nn
