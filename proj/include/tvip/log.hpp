#pragma once

#include <cstdio>

namespace tvip::log {

enum class Level { Error = 0, Info = 1, Debug = 2 };

// Level is read once from TVIPM_LOG ({error|info|debug}, default error).
Level level();

bool enabled(Level lvl);

void write(Level lvl, const char* fmt, ...);

#define TVIP_LOG_INFO(...) ::tvip::log::write(::tvip::log::Level::Info, __VA_ARGS__)
#define TVIP_LOG_DEBUG(...) ::tvip::log::write(::tvip::log::Level::Debug, __VA_ARGS__)
#define TVIP_LOG_ERROR(...) ::tvip::log::write(::tvip::log::Level::Error, __VA_ARGS__)

}  // namespace tvip::log
