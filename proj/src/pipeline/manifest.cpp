// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#include "vb/pipeline/manifest.hpp"

#include <fstream>
#include <set>

#include "vb/common/error.hpp"

namespace fs = std::filesystem;

namespace vb::pipeline {

Split parse_split(std::string_view s) {
  if (s == "train") return Split::train;
  if (s == "validation") return Split::validation;
  if (s == "test") return Split::test;
  throw ConfigError("unknown split '" + std::string(s) + "'");
}

std::string to_string(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::validation: return "validation";
    default: return "test";
  }
}

std::vector<const Utterance*> DatasetManifest::in_split(Split s) const {
  std::vector<const Utterance*> out;
  for (const auto& u : utterances)
    if (u.split == s) out.push_back(&u);
  return out;
}

const Utterance* DatasetManifest::find(std::string_view id) const {
  for (const auto& u : utterances)
    if (u.id == id) return &u;
  return nullptr;
}

void DatasetManifest::validate() const {
  std::set<std::string> seen;
  for (const auto& u : utterances) {
    if (u.id.empty()) throw ConfigError("manifest: empty utterance id");
    if (u.id.find_first_of("/\\") != std::string::npos) throw ConfigError("manifest: id '" + u.id + "' contains a path separator");
    if (!seen.insert(u.id).second) throw ConfigError("manifest: duplicate id '" + u.id + "'");
  }
}

nlohmann::json DatasetManifest::to_json(const fs::path& base) const {
  auto rel = [&](const fs::path& p) {
    return (base.empty() ? p : fs::absolute(p).lexically_relative(fs::absolute(base))).generic_string();
  };
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& u : utterances)
    arr.push_back({{"id", u.id}, {"wav", rel(u.wav)}, {"linguistic", rel(u.linguistic)}, {"split", to_string(u.split)}});
  return {{"utterances", arr}};
}

DatasetManifest load_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read manifest " + path.string());
  DatasetManifest m;
  try {
    const auto j = nlohmann::json::parse(in);
    const auto base = path.parent_path();
    for (const auto& e : j.at("utterances")) {
      Utterance u;
      u.id = e.at("id").get<std::string>();
      u.wav = base / e.at("wav").get<std::string>();
      u.linguistic = base / e.at("linguistic").get<std::string>();
      u.split = parse_split(e.value("split", std::string("train")));
      m.utterances.push_back(std::move(u));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("manifest " + path.string() + ": " + e.what());
  }
  m.validate();
  for (const auto& u : m.utterances)
    for (const auto& p : {u.wav, u.linguistic})
      if (!fs::exists(p)) throw IoError("manifest: " + u.id + ": missing file " + p.string());
  return m;
}

void save_manifest(const fs::path& path, const DatasetManifest& m) {
  m.validate();
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << m.to_json(path.parent_path()).dump(2) << "\n";
}

}  // namespace vb::pipeline
