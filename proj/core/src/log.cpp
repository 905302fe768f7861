#include "lad/log.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <mutex>
#include <string>

namespace lad::log {
namespace {

Level parse_env() {
  const char* env = std::getenv("LAD_LOG");
  if (env == nullptr) return Level::Warn;
  std::string v(env);
  if (v == "none") return Level::None;
  if (v == "error") return Level::Error;
  if (v == "warn") return Level::Warn;
  if (v == "info") return Level::Info;
  if (v == "debug") return Level::Debug;
  return Level::Warn;
}

std::atomic<Level>& threshold() {
  static std::atomic<Level> lvl{parse_env()};
  return lvl;
}

const char* tag(Level lvl) {
  switch (lvl) {
    case Level::Error: return "error";
    case Level::Warn: return "warn";
    case Level::Info: return "info";
    case Level::Debug: return "debug";
    default: return "";
  }
}

}  // namespace

Level level() { return threshold().load(std::memory_order_relaxed); }

void set_level(Level lvl) { threshold().store(lvl, std::memory_order_relaxed); }

void write(Level lvl, const std::string& msg) {
  if (lvl == Level::None || lvl > level()) return;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  std::fprintf(stderr, "[lad %s] %s\n", tag(lvl), msg.c_str());
}

}  // namespace lad::log
