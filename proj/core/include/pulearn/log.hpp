#pragma once

#include <string>

namespace pu {

enum class LogLevel { Quiet = 0, Warn = 1, Info = 2, Debug = 3 };

/// Verbosity is controlled by the PU_LOG environment variable
/// (quiet|warn|info|debug). Default is warn. Messages go to stderr so
/// stdout stays clean for report paths.
LogLevel log_level();

void log_warn(const std::string& msg);
void log_info(const std::string& msg);
void log_debug(const std::string& msg);

} // namespace pu
