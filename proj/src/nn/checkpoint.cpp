// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#include "vb/nn/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "vb/common/error.hpp"
#include "vb/signal/wav_io.hpp"

namespace vb::nn {
namespace {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

constexpr char kMagic[4] = {'V', 'B', 'C', 'K'};

template <typename T>
void put(std::vector<std::uint8_t>& out, T v) {
  const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
  out.insert(out.end(), p, p + sizeof(T));
}

template <typename T>
T get(const std::vector<std::uint8_t>& in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) throw IoError("checkpoint: truncated file");
  T v;
  std::memcpy(&v, in.data() + pos, sizeof(T));
  pos += sizeof(T);
  return v;
}

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const nlohmann::json& arch, const ParamList& params) {
  const std::string blob = arch.dump();
  std::vector<std::uint8_t> out(kMagic, kMagic + 4);
  put<std::uint32_t>(out, kCheckpointVersion);
  put<std::uint64_t>(out, blob.size());
  out.insert(out.end(), blob.begin(), blob.end());
  put<std::uint64_t>(out, parameter_count(params));
  for (const Tensor* p : params)
    for (double v : p->value.values()) put<float>(out, static_cast<float>(v));
  return out;
}

Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) throw IoError("checkpoint: bad magic");
  std::size_t pos = 4;
  const auto version = get<std::uint32_t>(bytes, pos);
  if (version != kCheckpointVersion) throw IoError("checkpoint: unsupported version " + std::to_string(version));
  const auto blob_len = get<std::uint64_t>(bytes, pos);
  if (pos + blob_len > bytes.size()) throw IoError("checkpoint: truncated architecture blob");
  Checkpoint ck;
  try {
    ck.arch = nlohmann::json::parse(bytes.begin() + pos, bytes.begin() + pos + blob_len);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("checkpoint: bad architecture blob: ") + e.what());
  }
  pos += blob_len;
  const auto count = get<std::uint64_t>(bytes, pos);
  if (pos + count * sizeof(float) != bytes.size()) throw IoError("checkpoint: parameter block size mismatch");
  ck.params.resize(count);
  std::memcpy(ck.params.data(), bytes.data() + pos, count * sizeof(float));
  return ck;
}

void save_checkpoint(const std::filesystem::path& path, const nlohmann::json& arch, const ParamList& params) {
  const auto bytes = encode_checkpoint(arch, params);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write " + path.string());
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw IoError("write failed: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  return decode_checkpoint(signal::read_file_bytes(path));
}

void restore_params(const Checkpoint& ck, const ParamList& params) {
  if (ck.params.size() != parameter_count(params))
    throw ShapeError("restore_params", "checkpoint holds " + std::to_string(ck.params.size()) +
                                           " parameters, model has " + std::to_string(parameter_count(params)));
  std::size_t k = 0;
  for (Tensor* p : params) {
    for (double& v : p->value.values()) v = ck.params[k++];
    p->zero_grad();
  }
}

}  // namespace vb::nn
