// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>

#include "json.hpp"
#include "vb/common/matrix.hpp"
#include "vb/features/extract.hpp"

// On-disk layout (little-endian):
//   char[4] magic ("VBFS" acoustic, "VBLF" linguistic)
//   u32 version, u32 N, u32 M, u32 B, f32 frame_rate
//   acoustic:   f32 MGC[N][M], f32 BAP[N][B], f32 F0[N], f32 QF0[N]
//   linguistic: f32 L[N][M]   (M holds the feature dimension D, B = 0)
// plus a "<file>.json" sidecar with the extraction settings.

namespace vb::features {

inline constexpr std::uint32_t kFeatureStoreVersion = 1;

void write_features(const std::filesystem::path& path, const AcousticFrameSequence& seq,
                    const nlohmann::json& sidecar = nlohmann::json::object());

struct StoredFeatures {
  AcousticFrameSequence features;
  nlohmann::json sidecar;
};

/// Reads the binary file and, when present, its sidecar (for warp_alpha).
StoredFeatures read_features(const std::filesystem::path& path);

void write_linguistic(const std::filesystem::path& path, const Matrix& features, double frame_rate);
Matrix read_linguistic(const std::filesystem::path& path);

std::filesystem::path sidecar_path(const std::filesystem::path& path);

}  // namespace vb::features
