#pragma once

#include <functional>
#include <iostream>
#include <mutex>
#include <string_view>

namespace gather::log {

enum class Level { debug = 0, info = 1, warn = 2, error = 3, off = 4 };

using Sink = std::function<void(Level, std::string_view)>;

namespace detail {

struct State {
    std::mutex mutex;
    Level threshold = Level::warn;
    Sink sink;
};

inline State& state() {
    static State s;
    return s;
}

inline std::string_view label(Level level) {
    switch (level) {
        case Level::debug: return "debug";
        case Level::info: return "info";
        case Level::warn: return "warn";
        case Level::error: return "error";
        case Level::off: break;
    }
    return "";
}

}  // namespace detail

inline void set_level(Level level) {
    auto& s = detail::state();
    std::lock_guard lock(s.mutex);
    s.threshold = level;
}

/// Replaces the stderr sink; pass an empty function to restore it.
inline void set_sink(Sink sink) {
    auto& s = detail::state();
    std::lock_guard lock(s.mutex);
    s.sink = std::move(sink);
}

inline void write(Level level, std::string_view message) {
    auto& s = detail::state();
    std::lock_guard lock(s.mutex);
    if (level < s.threshold) return;
    if (s.sink) {
        s.sink(level, message);
    } else {
        std::cerr << "[gather " << detail::label(level) << "] " << message << '\n';
    }
}

inline void debug(std::string_view m) { write(Level::debug, m); }
inline void info(std::string_view m) { write(Level::info, m); }
inline void warn(std::string_view m) { write(Level::warn, m); }

}  // namespace gather::log
