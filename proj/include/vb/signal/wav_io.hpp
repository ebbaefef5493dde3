// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "vb/signal/waveform.hpp"

namespace vb::signal {

enum class WavFormat { pcm16, float32 };

/// Parses a mono little-endian RIFF/WAVE image (16-bit PCM or 32-bit float).
/// Throws IoError on multi-channel, unsupported or truncated data.
Waveform parse_wav(std::span<const std::uint8_t> bytes);
Waveform read_wav(const std::filesystem::path& path);

std::vector<std::uint8_t> encode_wav(const Waveform& wave, WavFormat format);
/// 16-bit output is scaled by 32768, rounded and clamped to the int16 range.
void write_wav(const std::filesystem::path& path, const Waveform& wave,
               WavFormat format = WavFormat::pcm16);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);

}  // namespace vb::signal
