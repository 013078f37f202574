#pragma once

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>

namespace grp {

/// Diagnostic verbosity, controlled by the GRP_LOG environment variable:
/// unset/empty → silent, "info" → milestones, "debug" → per-round detail.
enum class LogLevel { Silent = 0, Info = 1, Debug = 2 };

inline LogLevel log_level() {
    static const LogLevel level = [] {
        const char* env = std::getenv("GRP_LOG");
        if (!env) return LogLevel::Silent;
        const std::string v(env);
        if (v == "debug") return LogLevel::Debug;
        if (v == "info") return LogLevel::Info;
        return LogLevel::Silent;
    }();
    return level;
}

inline void log_line(LogLevel at, const std::string& msg) {
    if (log_level() >= at) std::cerr << "[grp] " << msg << '\n';
}

} // namespace grp
