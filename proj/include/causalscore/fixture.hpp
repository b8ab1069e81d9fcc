#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>

#include "causalscore/classifier.hpp"

namespace causalscore {

// Recorded probabilities keyed by (dialogue_id, candidate, conditioning,
// response). A lookup miss is an error, never a default.
class FixtureBackend final : public DependenceBackend {
 public:
  struct Key {
    std::string dialogue_id;
    std::size_t candidate = 0;
    std::optional<std::size_t> conditioning;
    std::size_t response = 0;

    auto tie() const { return std::tie(dialogue_id, candidate, conditioning, response); }
    friend bool operator<(const Key& a, const Key& b) { return a.tie() < b.tie(); }
  };

  // Throws InvariantError for probabilities outside [0,1] or duplicate keys.
  void add(Key key, double prob);

  double predict(const Query& query) const override;

  std::size_t size() const { return table_.size(); }

  static FixtureBackend parse(std::istream& in, std::string_view source = "<stream>");
  static FixtureBackend load(const std::filesystem::path& path);

 private:
  std::map<Key, double> table_;
};

}  // namespace causalscore
