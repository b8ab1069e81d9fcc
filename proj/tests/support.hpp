#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <unistd.h>

#include "causalscore/classifier.hpp"
#include "causalscore/corpus.hpp"
#include "causalscore/log.hpp"

namespace testing {

inline std::filesystem::path data_dir() { return CAUSALSCORE_TEST_DATA; }
inline std::filesystem::path data(const std::string& name) { return data_dir() / name; }

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("causalscore_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

inline void spit(const std::filesystem::path& p, const std::string& content) {
  std::ofstream f(p, std::ios::binary);
  f << content;
}

// Collects log output for the lifetime of the object.
class LogCapture {
 public:
  LogCapture()
      : sink_([this](causalscore::log::Level level, std::string_view msg) {
          std::lock_guard lock(mutex_);
          lines_.push_back(std::string(level == causalscore::log::Level::warning ? "warning: " : "info: ") +
                           std::string(msg));
        }) {}
  std::vector<std::string> lines() const {
    std::lock_guard lock(mutex_);
    return lines_;
  }
  bool contains(const std::string& needle) const {
    for (const auto& l : lines()) {
      if (l.find(needle) != std::string::npos) return true;
    }
    return false;
  }

 private:
  mutable std::mutex mutex_;
  std::vector<std::string> lines_;
  causalscore::log::ScopedSink sink_;
};

// Dialogue with utterances "u0 <word>", "u1 <word>", ... and given causes.
inline causalscore::HistoryResponsePair make_pair(const std::string& dialogue, std::size_t response_index,
                                                  std::vector<std::size_t> causes = {}) {
  causalscore::HistoryResponsePair p;
  p.dialogue_id = dialogue;
  p.response_index = response_index;
  for (std::size_t i = 0; i < response_index; ++i) {
    p.history.push_back({i, i % 2 ? "b" : "a", dialogue + " utterance " + std::to_string(i)});
  }
  p.response = {response_index, response_index % 2 ? "b" : "a", dialogue + " reply " + std::to_string(response_index)};
  for (auto c : causes) p.causes.push_back({c, {}});
  return p;
}

// Backend answering from a function of the query.
class FunctionBackend final : public causalscore::DependenceBackend {
 public:
  explicit FunctionBackend(std::function<double(const causalscore::Query&)> fn) : fn_(std::move(fn)) {}
  double predict(const causalscore::Query& q) const override { return fn_(q); }

 private:
  std::function<double(const causalscore::Query&)> fn_;
};

}  // namespace testing
