// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string_view>

#include "json.hpp"

namespace vb::log {

enum class Level { debug = 0, info = 1, warn = 2, error = 3, off = 4 };

void set_level(Level level);
Level level();

/// Emits one JSON object per line on stderr:
/// {"level": ..., "event": ..., <fields>}.
void emit(Level level, std::string_view event, const nlohmann::json& fields = {});

inline void debug(std::string_view e, const nlohmann::json& f = {}) { emit(Level::debug, e, f); }
inline void info(std::string_view e, const nlohmann::json& f = {}) { emit(Level::info, e, f); }
inline void warn(std::string_view e, const nlohmann::json& f = {}) { emit(Level::warn, e, f); }
inline void error(std::string_view e, const nlohmann::json& f = {}) { emit(Level::error, e, f); }

}  // namespace vb::log
