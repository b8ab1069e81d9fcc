#pragma once

#include <functional>
#include <string_view>

namespace causalscore::log {

enum class Level { info, warning };

using Sink = std::function<void(Level, std::string_view)>;

// Replaces the process-wide sink and returns the previous one. The default
// sink writes "warning: ..." / "info: ..." lines to stderr.
Sink set_sink(Sink sink);

void info(std::string_view message);
void warn(std::string_view message);

// Restores the previous sink on destruction; used by tests to capture output.
class ScopedSink {
 public:
  explicit ScopedSink(Sink sink) : previous_(set_sink(std::move(sink))) {}
  ~ScopedSink() { set_sink(std::move(previous_)); }
  ScopedSink(const ScopedSink&) = delete;
  ScopedSink& operator=(const ScopedSink&) = delete;

 private:
  Sink previous_;
};

}  // namespace causalscore::log
