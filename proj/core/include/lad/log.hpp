#pragma once

#include <string>

namespace lad::log {

enum class Level { None = 0, Error = 1, Warn = 2, Info = 3, Debug = 4 };

// Threshold comes from the LAD_LOG environment variable
// (none|error|warn|info|debug); default is warn.
Level level();
void set_level(Level lvl);

void write(Level lvl, const std::string& msg);

inline void error(const std::string& msg) { write(Level::Error, msg); }
inline void warn(const std::string& msg) { write(Level::Warn, msg); }
inline void info(const std::string& msg) { write(Level::Info, msg); }
inline void debug(const std::string& msg) { write(Level::Debug, msg); }

}  // namespace lad::log
