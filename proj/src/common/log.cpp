#include "nids/common/log.hpp"

#include <iostream>
#include <mutex>
#include <utility>

namespace nids::log {
namespace {

std::mutex& sink_mutex() {
  static std::mutex m;
  return m;
}

Sink& current_sink() {
  static Sink sink = [](Level level, std::string_view message) {
    static constexpr std::string_view tags[] = {"debug", "info", "warn", "error"};
    std::cerr << '[' << tags[static_cast<int>(level)] << "] " << message << '\n';
  };
  return sink;
}

Level& threshold() {
  static Level level = Level::info;
  return level;
}

}  // namespace

Sink set_sink(Sink sink) {
  std::lock_guard lock(sink_mutex());
  return std::exchange(current_sink(), std::move(sink));
}

void set_level(Level level) {
  std::lock_guard lock(sink_mutex());
  threshold() = level;
}

void write(Level level, std::string_view message) {
  std::lock_guard lock(sink_mutex());
  if (level < threshold() || !current_sink()) return;
  current_sink()(level, message);
}

}  // namespace nids::log
