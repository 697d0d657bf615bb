#include "cand/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace cand::log {

namespace {
std::atomic<Level> current{Level::warn};
std::mutex sink;
}  // namespace

void set_level(Level l) { current = l; }
Level level() { return current; }

void warn(const std::string& message) {
    if (current < Level::warn) return;
    std::lock_guard lock(sink);
    std::cerr << "warning: " << message << '\n';
}

void info(const std::string& message) {
    if (current < Level::info) return;
    std::lock_guard lock(sink);
    std::cerr << message << '\n';
}

}  // namespace cand::log
