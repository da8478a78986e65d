#pragma once

#include <string>

namespace helio {

enum class LogLevel { kError = 0, kWarn = 1, kInfo = 2, kDebug = 3 };

// Level comes from HELIO_LOG (error|warn|info|debug or 0..3), default warn.
LogLevel log_level();
void set_log_level(LogLevel lv);
bool log_enabled(LogLevel lv);
void log_msg(LogLevel lv, const std::string& msg);

}  // namespace helio
