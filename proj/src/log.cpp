#include "wtls/log.hpp"

#include <cstdlib>
#include <iostream>

namespace wtls {

LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("RTLS_LOG");
    if (!env) return LogLevel::off;
    const std::string v(env);
    if (v == "debug" || v == "2") return LogLevel::debug;
    if (v == "info" || v == "1") return LogLevel::info;
    return LogLevel::off;
  }();
  return level;
}

void log_info(const std::string& msg) {
  if (log_level() >= LogLevel::info) std::cerr << "[rtls] " << msg << '\n';
}

void log_debug(const std::string& msg) {
  if (log_level() >= LogLevel::debug) std::cerr << "[rtls:debug] " << msg << '\n';
}

}  // namespace wtls
