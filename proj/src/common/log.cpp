// Copyright 2026 vocoderbench authors
// SPDX-License-Identifier: Apache-2.0

#include "vb/common/log.hpp"

#include <atomic>
#include <cstdio>
#include <mutex>
#include <string>

namespace vb::log {
namespace {

std::atomic<Level> g_level{Level::info};
std::mutex g_mutex;

const char* name(Level l) {
  switch (l) {
    case Level::debug: return "debug";
    case Level::info: return "info";
    case Level::warn: return "warn";
    case Level::error: return "error";
    default: return "off";
  }
}

}  // namespace

void set_level(Level level) { g_level = level; }
Level level() { return g_level; }

void emit(Level lvl, std::string_view event, const nlohmann::json& fields) {
  if (lvl < g_level.load()) return;
  nlohmann::json line = {{"level", name(lvl)}, {"event", std::string(event)}};
  if (fields.is_object())
    for (auto it = fields.begin(); it != fields.end(); ++it) line[it.key()] = it.value();
  const std::string text = line.dump() + "\n";
  std::lock_guard lock(g_mutex);
  std::fputs(text.c_str(), stderr);
}

}  // namespace vb::log
