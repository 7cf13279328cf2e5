#include "nvcom/log.hpp"

#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string>

namespace nvcom::log {

namespace {

Level parse_level(const char* text) {
    if (text == nullptr) return Level::warn;
    const std::string s(text);
    if (s == "error") return Level::error;
    if (s == "info") return Level::info;
    if (s == "debug") return Level::debug;
    return Level::warn;
}

constexpr std::string_view tag(Level level) {
    switch (level) {
        case Level::error: return "error";
        case Level::warn: return "warn";
        case Level::info: return "info";
        case Level::debug: return "debug";
    }
    return "?";
}

}  // namespace

Level threshold() {
    static const Level level = parse_level(std::getenv("NVCOM_LOG_LEVEL"));
    return level;
}

void write(Level level, std::string_view message) {
    if (static_cast<int>(level) > static_cast<int>(threshold())) return;
    static std::mutex mutex;
    std::lock_guard lock(mutex);
    std::clog << "[nvcom " << tag(level) << "] " << message << '\n';
}

}  // namespace nvcom::log
