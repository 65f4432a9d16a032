#pragma once

#include <string>

namespace wtls {

enum class LogLevel { off = 0, info = 1, debug = 2 };

/// Level from the RTLS_LOG environment variable ("off", "info", "debug";
/// unset means off). Read once.
LogLevel log_level();

void log_info(const std::string& msg);
void log_debug(const std::string& msg);

}  // namespace wtls
