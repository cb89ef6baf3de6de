#include "wgt/log.hpp"

#include <cstdlib>
#include <iostream>
#include <mutex>

namespace wgt::log {

namespace {

Level parse_env() {
    const char* v = std::getenv("WGT_LOG");
    if (v == nullptr) return Level::warn;
    const std::string s(v);
    if (s == "error") return Level::error;
    if (s == "warn") return Level::warn;
    if (s == "info") return Level::info;
    if (s == "debug") return Level::debug;
    return Level::warn;
}

const char* tag(Level level) {
    switch (level) {
        case Level::error: return "error";
        case Level::warn: return "warn";
        case Level::info: return "info";
        case Level::debug: return "debug";
    }
    return "?";
}

std::mutex io_mutex;

}  // namespace

Level threshold() {
    static const Level cached = parse_env();
    return cached;
}

void write(Level level, const std::string& message) {
    if (static_cast<int>(level) > static_cast<int>(threshold())) return;
    const std::lock_guard<std::mutex> lock(io_mutex);
    std::cerr << "[wgt:" << tag(level) << "] " << message << '\n';
}

}  // namespace wgt::log
