// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace vb::pipeline {

enum class Split { train, validation, test };

Split parse_split(std::string_view s);
std::string to_string(Split s);

struct Utterance {
  std::string id;
  std::filesystem::path wav;
  std::filesystem::path linguistic;
  Split split = Split::train;
};

/// JSON file {"utterances": [{"id", "wav", "linguistic", "split"}, ...]}.
/// Paths are stored relative to the manifest's directory.
struct DatasetManifest {
  std::vector<Utterance> utterances;

  std::vector<const Utterance*> in_split(Split s) const;
  const Utterance* find(std::string_view id) const;

  /// Throws ConfigError on duplicate or empty ids.
  void validate() const;
  nlohmann::json to_json(const std::filesystem::path& base = {}) const;
};

/// Resolves paths against the manifest's directory and checks that every
/// referenced file exists (IoError naming the first missing one).
DatasetManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const std::filesystem::path& path, const DatasetManifest& m);

}  // namespace vb::pipeline
