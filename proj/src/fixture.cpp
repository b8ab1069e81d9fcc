#include "causalscore/fixture.hpp"

#include <cmath>
#include <fstream>
#include <istream>

#include <json.hpp>

#include "causalscore/error.hpp"
#include "causalscore/text.hpp"

namespace causalscore {

void FixtureBackend::add(Key key, double prob) {
  if (!std::isfinite(prob) || prob < 0.0 || prob > 1.0) {
    throw InvariantError("fixture probability " + text::format_double(prob) + " outside [0,1] for dialogue " +
                         key.dialogue_id);
  }
  const std::string id = key.dialogue_id;
  if (!table_.emplace(std::move(key), prob).second) {
    throw InvariantError("duplicate fixture entry for dialogue " + id);
  }
}

double FixtureBackend::predict(const Query& query) const {
  Key key{query.response.dialogue_id, query.candidate.index, std::nullopt, query.response.index};
  if (query.task == Task::cond) {
    if (!query.conditioning) throw BackendError("fixture backend: conditional query without conditioning");
    key.conditioning = query.conditioning->index;
  }
  const auto it = table_.find(key);
  if (it == table_.end()) {
    std::string cond = key.conditioning ? std::to_string(*key.conditioning) : "null";
    throw BackendError("fixture miss: dialogue_id=" + key.dialogue_id + " candidate=" +
                       std::to_string(key.candidate) + " conditioning=" + cond +
                       " response=" + std::to_string(key.response));
  }
  return it->second;
}

FixtureBackend FixtureBackend::parse(std::istream& in, std::string_view source) {
  FixtureBackend backend;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    const std::string where = std::string(source) + ":" + std::to_string(line_no);
    try {
      const auto j = nlohmann::json::parse(line);
      Key key;
      key.dialogue_id = j.at("dialogue_id").get<std::string>();
      key.candidate = j.at("candidate").get<std::size_t>();
      if (j.contains("conditioning") && !j.at("conditioning").is_null()) {
        key.conditioning = j.at("conditioning").get<std::size_t>();
      }
      key.response = j.at("response").get<std::size_t>();
      backend.add(std::move(key), j.at("prob").get<double>());
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(where + ": " + e.what());
    } catch (const InvariantError& e) {
      throw InvariantError(where + ": " + e.what());
    }
  }
  return backend;
}

FixtureBackend FixtureBackend::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open fixture file " + path.string());
  return parse(in, path.string());
}

}  // namespace causalscore
