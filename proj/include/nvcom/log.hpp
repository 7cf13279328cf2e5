#pragma once

#include <string_view>

namespace nvcom::log {

enum class Level { error = 0, warn = 1, info = 2, debug = 3 };

/// Threshold read once from NVCOM_LOG_LEVEL (error|warn|info|debug); defaults to warn.
Level threshold();

void write(Level level, std::string_view message);

inline void warn(std::string_view message) { write(Level::warn, message); }
inline void info(std::string_view message) { write(Level::info, message); }
inline void debug(std::string_view message) { write(Level::debug, message); }

}  // namespace nvcom::log
