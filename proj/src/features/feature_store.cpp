// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#include "vb/features/feature_store.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "vb/common/error.hpp"

namespace vb::features {
namespace {

struct Header {
  char magic[4];
  std::uint32_t version;
  std::uint32_t n;
  std::uint32_t m;
  std::uint32_t b;
  float frame_rate;
};
static_assert(sizeof(Header) == 24);

void put_floats(std::ofstream& out, const double* v, std::size_t count) {
  std::vector<float> buf(v, v + count);
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(count * sizeof(float)));
}

std::vector<double> get_floats(std::ifstream& in, std::size_t count, const std::filesystem::path& path) {
  std::vector<float> buf(count);
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(count * sizeof(float)));
  if (static_cast<std::size_t>(in.gcount()) != count * sizeof(float)) throw IoError(path.string() + ": truncated feature file");
  return {buf.begin(), buf.end()};
}

Header read_header(std::ifstream& in, const std::filesystem::path& path, const char* magic) {
  Header h{};
  in.read(reinterpret_cast<char*>(&h), sizeof h);
  if (!in || std::memcmp(h.magic, magic, 4) != 0) throw IoError(path.string() + ": bad feature-file magic");
  if (h.version != kFeatureStoreVersion)
    throw IoError(path.string() + ": unsupported feature-file version " + std::to_string(h.version));
  return h;
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

}  // namespace

std::filesystem::path sidecar_path(const std::filesystem::path& path) {
  auto p = path;
  p += ".json";
  return p;
}

void write_features(const std::filesystem::path& path, const AcousticFrameSequence& seq, const nlohmann::json& sidecar) {
  seq.validate();
  const std::size_t n = seq.frames();
  Header h{{'V', 'B', 'F', 'S'}, kFeatureStoreVersion, static_cast<std::uint32_t>(n),
           static_cast<std::uint32_t>(seq.mgc.order()), static_cast<std::uint32_t>(seq.bap.bands()),
           static_cast<float>(seq.f0.frame_rate)};
  auto out = open_out(path);
  out.write(reinterpret_cast<const char*>(&h), sizeof h);
  put_floats(out, seq.mgc.coeffs.data(), seq.mgc.coeffs.size());
  put_floats(out, seq.bap.values.data(), seq.bap.values.size());
  put_floats(out, seq.f0.f0.data(), n);
  std::vector<double> q(n, 0.0);
  for (std::size_t i = 0; i < seq.qf0.levels.size(); ++i) q[i] = seq.qf0.levels[i];
  put_floats(out, q.data(), n);
  if (!out) throw IoError("write failed: " + path.string());

  nlohmann::json side = sidecar;
  side["warp_alpha"] = seq.mgc.warp_alpha;
  side["has_qf0"] = !seq.qf0.levels.empty();
  std::ofstream js(sidecar_path(path));
  js << side.dump(2) << "\n";
}

StoredFeatures read_features(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const Header h = read_header(in, path, "VBFS");
  StoredFeatures s;
  auto& f = s.features;
  f.mgc.coeffs = Matrix(h.n, h.m, get_floats(in, std::size_t{h.n} * h.m, path));
  f.bap.values = Matrix(h.n, h.b, get_floats(in, std::size_t{h.n} * h.b, path));
  f.f0.f0 = get_floats(in, h.n, path);
  f.f0.frame_rate = h.frame_rate;
  const auto q = get_floats(in, h.n, path);
  const auto side = sidecar_path(path);
  if (std::filesystem::exists(side)) {
    std::ifstream js(side);
    s.sidecar = nlohmann::json::parse(js);
    f.mgc.warp_alpha = s.sidecar.value("warp_alpha", 0.0);
  }
  if (s.sidecar.value("has_qf0", true)) {
    f.qf0.levels.resize(h.n);
    for (std::size_t i = 0; i < h.n; ++i) f.qf0.levels[i] = static_cast<int>(std::lround(q[i]));
  }
  return s;
}

void write_linguistic(const std::filesystem::path& path, const Matrix& features, double frame_rate) {
  Header h{{'V', 'B', 'L', 'F'}, kFeatureStoreVersion, static_cast<std::uint32_t>(features.rows()),
           static_cast<std::uint32_t>(features.cols()), 0, static_cast<float>(frame_rate)};
  auto out = open_out(path);
  out.write(reinterpret_cast<const char*>(&h), sizeof h);
  put_floats(out, features.data(), features.size());
  if (!out) throw IoError("write failed: " + path.string());
}

Matrix read_linguistic(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const Header h = read_header(in, path, "VBLF");
  return Matrix(h.n, h.m, get_floats(in, std::size_t{h.n} * h.m, path));
}

}  // namespace vb::features
