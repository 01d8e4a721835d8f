#pragma once

#include <iostream>
#include <string_view>

namespace plml::log {

enum class Level { Quiet = 0, Warn = 1, Info = 2, Debug = 3 };

inline Level& level() {
  static Level current = Level::Warn;
  return current;
}

inline void set_level(Level l) { level() = l; }

inline void warn(std::string_view msg) {
  if (level() >= Level::Warn) std::clog << "warning: " << msg << '\n';
}

inline void info(std::string_view msg) {
  if (level() >= Level::Info) std::clog << msg << '\n';
}

inline void debug(std::string_view msg) {
  if (level() >= Level::Debug) std::clog << msg << '\n';
}

}  // namespace plml::log
