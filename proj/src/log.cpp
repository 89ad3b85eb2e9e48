#include "tvip/log.hpp"

#include <cstdarg>
#include <cstdlib>
#include <cstring>

namespace tvip::log {

namespace {

Level read_level() {
  const char* env = std::getenv("TVIPM_LOG");
  if (env == nullptr) return Level::Error;
  if (std::strcmp(env, "debug") == 0) return Level::Debug;
  if (std::strcmp(env, "info") == 0) return Level::Info;
  return Level::Error;
}

}  // namespace

Level level() {
  static const Level lvl = read_level();
  return lvl;
}

bool enabled(Level lvl) { return static_cast<int>(lvl) <= static_cast<int>(level()); }

void write(Level lvl, const char* fmt, ...) {
  if (!enabled(lvl)) return;
  const char* tag = lvl == Level::Error ? "error" : (lvl == Level::Info ? "info" : "debug");
  std::fprintf(stderr, "[tvip %s] ", tag);
  va_list args;
  va_start(args, fmt);
  std::vfprintf(stderr, fmt, args);
  va_end(args);
  std::fputc('\n', stderr);
}

}  // namespace tvip::log
