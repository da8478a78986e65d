#include "helio/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace helio {

namespace {

LogLevel parse_env() {
  const char* env = std::getenv("HELIO_LOG");
  if (!env || !*env) return LogLevel::kWarn;
  if (!std::strcmp(env, "error") || !std::strcmp(env, "0")) return LogLevel::kError;
  if (!std::strcmp(env, "warn") || !std::strcmp(env, "1")) return LogLevel::kWarn;
  if (!std::strcmp(env, "info") || !std::strcmp(env, "2")) return LogLevel::kInfo;
  if (!std::strcmp(env, "debug") || !std::strcmp(env, "3")) return LogLevel::kDebug;
  std::fprintf(stderr, "[log] unknown HELIO_LOG value '%s', using warn\n", env);
  return LogLevel::kWarn;
}

LogLevel g_level = parse_env();

const char* tag(LogLevel lv) {
  switch (lv) {
    case LogLevel::kError: return "error";
    case LogLevel::kWarn: return "warn";
    case LogLevel::kInfo: return "info";
    default: return "debug";
  }
}

}  // namespace

LogLevel log_level() { return g_level; }
void set_log_level(LogLevel lv) { g_level = lv; }
bool log_enabled(LogLevel lv) { return static_cast<int>(lv) <= static_cast<int>(g_level); }

void log_msg(LogLevel lv, const std::string& msg) {
  if (!log_enabled(lv)) return;
  std::fprintf(stderr, "[%s] %s\n", tag(lv), msg.c_str());
}

}  // namespace helio
