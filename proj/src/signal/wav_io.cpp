// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#include "vb/signal/wav_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>

#include "vb/common/error.hpp"

namespace vb::signal {
namespace {

static_assert(std::endian::native == std::endian::little, "WAV I/O assumes a little-endian host");

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

template <typename T>
T load(std::span<const std::uint8_t> b, std::size_t off) {
  T v;
  std::memcpy(&v, b.data() + off, sizeof(T));
  return v;
}

template <typename T>
void store(std::vector<std::uint8_t>& out, T v) {
  const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
  out.insert(out.end(), p, p + sizeof(T));
}

void tag(std::vector<std::uint8_t>& out, const char* t) { out.insert(out.end(), t, t + 4); }

}  // namespace

Waveform parse_wav(std::span<const std::uint8_t> b) {
  if (b.size() < 12 || std::memcmp(b.data(), "RIFF", 4) != 0 || std::memcmp(b.data() + 8, "WAVE", 4) != 0)
    throw IoError("not a RIFF/WAVE file");
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  bool have_fmt = false;
  std::size_t off = 12;
  while (off + 8 <= b.size()) {
    const std::uint32_t size = load<std::uint32_t>(b, off + 4);
    const std::size_t body = off + 8;
    if (std::memcmp(b.data() + off, "fmt ", 4) == 0) {
      if (size < 16 || body + size > b.size()) throw IoError("truncated fmt chunk");
      format = load<std::uint16_t>(b, body);
      channels = load<std::uint16_t>(b, body + 2);
      rate = load<std::uint32_t>(b, body + 4);
      bits = load<std::uint16_t>(b, body + 14);
      if (format == kFormatExtensible) {
        if (size < 40) throw IoError("truncated WAVE_FORMAT_EXTENSIBLE header");
        format = load<std::uint16_t>(b, body + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(b.data() + off, "data", 4) == 0) {
      if (!have_fmt) throw IoError("data chunk before fmt chunk");
      if (channels != 1) throw IoError("only mono WAV is supported (got " + std::to_string(channels) + " channels)");
      if (rate == 0) throw IoError("zero sample rate");
      if (body + size > b.size())
        throw IoError("truncated data chunk (" + std::to_string(b.size() - body) + " of " +
                      std::to_string(size) + " bytes)");
      Waveform w;
      w.sample_rate = static_cast<int>(rate);
      if (format == kFormatPcm && bits == 16) {
        w.samples.resize(size / 2);
        for (std::size_t i = 0; i < w.samples.size(); ++i)
          w.samples[i] = load<std::int16_t>(b, body + 2 * i) / 32768.0;
      } else if (format == kFormatFloat && bits == 32) {
        w.samples.resize(size / 4);
        for (std::size_t i = 0; i < w.samples.size(); ++i) w.samples[i] = load<float>(b, body + 4 * i);
      } else {
        throw IoError("unsupported WAV encoding (format " + std::to_string(format) + ", " +
                      std::to_string(bits) + " bits)");
      }
      return w;
    }
    off = body + size + (size & 1u);
  }
  throw IoError("no data chunk");
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Waveform read_wav(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  try {
    return parse_wav(bytes);
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

std::vector<std::uint8_t> encode_wav(const Waveform& wave, WavFormat format) {
  const std::uint16_t bits = format == WavFormat::pcm16 ? 16 : 32;
  const std::uint16_t block = bits / 8;
  const auto data_size = static_cast<std::uint32_t>(wave.size() * block);
  std::vector<std::uint8_t> out;
  out.reserve(44 + data_size);
  tag(out, "RIFF");
  store<std::uint32_t>(out, 36 + data_size);
  tag(out, "WAVE");
  tag(out, "fmt ");
  store<std::uint32_t>(out, 16);
  store<std::uint16_t>(out, format == WavFormat::pcm16 ? kFormatPcm : kFormatFloat);
  store<std::uint16_t>(out, 1);
  store<std::uint32_t>(out, static_cast<std::uint32_t>(wave.sample_rate));
  store<std::uint32_t>(out, static_cast<std::uint32_t>(wave.sample_rate) * block);
  store<std::uint16_t>(out, block);
  store<std::uint16_t>(out, bits);
  tag(out, "data");
  store<std::uint32_t>(out, data_size);
  for (double x : wave.samples) {
    if (format == WavFormat::pcm16) {
      const long v = std::lround(std::clamp(x, -1.0, 1.0) * 32768.0);
      store<std::int16_t>(out, static_cast<std::int16_t>(std::clamp(v, -32768L, 32767L)));
    } else {
      store<float>(out, static_cast<float>(x));
    }
  }
  return out;
}

void write_wav(const std::filesystem::path& path, const Waveform& wave, WavFormat format) {
  const auto bytes = encode_wav(wave, format);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace vb::signal
