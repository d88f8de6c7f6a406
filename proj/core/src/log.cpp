#include "pulearn/log.hpp"

#include <cstdlib>
#include <iostream>

namespace pu {

LogLevel log_level() {
    static LogLevel level = [] {
        const char* env = std::getenv("PU_LOG");
        if (!env) return LogLevel::Warn;
        std::string s(env);
        if (s == "quiet") return LogLevel::Quiet;
        if (s == "info") return LogLevel::Info;
        if (s == "debug") return LogLevel::Debug;
        return LogLevel::Warn;
    }();
    return level;
}

static void emit(LogLevel at, const char* tag, const std::string& msg) {
    if (log_level() >= at) std::cerr << "[pu:" << tag << "] " << msg << '\n';
}

void log_warn(const std::string& msg) { emit(LogLevel::Warn, "warn", msg); }
void log_info(const std::string& msg) { emit(LogLevel::Info, "info", msg); }
void log_debug(const std::string& msg) { emit(LogLevel::Debug, "debug", msg); }

} // namespace pu
