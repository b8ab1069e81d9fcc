#include "causalscore/log.hpp"

#include <iostream>
#include <mutex>

namespace causalscore::log {
namespace {

std::mutex& sink_mutex() {
  static std::mutex m;
  return m;
}

void stderr_sink(Level level, std::string_view message) {
  std::cerr << (level == Level::warning ? "warning: " : "info: ") << message << '\n';
}

Sink& current() {
  static Sink sink = stderr_sink;
  return sink;
}

void emit(Level level, std::string_view message) {
  std::lock_guard lock(sink_mutex());
  if (current()) current()(level, message);
}

}  // namespace

Sink set_sink(Sink sink) {
  std::lock_guard lock(sink_mutex());
  Sink previous = std::move(current());
  current() = sink ? std::move(sink) : Sink(stderr_sink);
  return previous;
}

void info(std::string_view message) { emit(Level::info, message); }
void warn(std::string_view message) { emit(Level::warning, message); }

}  // namespace causalscore::log
