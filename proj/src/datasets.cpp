#include "causalscore/datasets.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>

#include <json.hpp>

#include "causalscore/error.hpp"
#include "causalscore/log.hpp"
#include "causalscore/parallel.hpp"
#include "causalscore/random.hpp"
#include "causalscore/text.hpp"

namespace causalscore {
namespace {

using nlohmann::json;

// All distinct utterances of a corpus, sorted by (dialogue_id, index), so the
// utterances of one dialogue form a contiguous block.
class UtterancePool {
 public:
  explicit UtterancePool(const Corpus& corpus) {
    std::map<std::pair<std::string, std::size_t>, std::string> all;
    for (const auto& pair : corpus.pairs()) {
      for (const auto& u : pair.history) all.try_emplace({pair.dialogue_id, u.index}, u.text);
      all.try_emplace({pair.dialogue_id, pair.response.index}, pair.response.text);
    }
    for (auto& [key, text] : all) items_.push_back({key.first, key.second, text});
  }

  // Uniform over utterances whose dialogue differs from `exclude`.
  const UtteranceRef& sample_foreign(const std::string& exclude, Rng& rng) const {
    const auto lo = std::lower_bound(items_.begin(), items_.end(), exclude,
                                     [](const UtteranceRef& u, const std::string& id) { return u.dialogue_id < id; });
    const auto hi = std::upper_bound(items_.begin(), items_.end(), exclude,
                                     [](const std::string& id, const UtteranceRef& u) { return id < u.dialogue_id; });
    const auto own = static_cast<std::size_t>(hi - lo);
    const auto start = static_cast<std::size_t>(lo - items_.begin());
    if (items_.size() == own) throw PreconditionError("no utterances outside dialogue " + exclude);
    std::size_t k = rng.uniform_index(items_.size() - own);
    if (k >= start) k += own;
    return items_[k];
  }

 private:
  std::vector<UtteranceRef> items_;
};

void require_two_dialogues(const Corpus& corpus, const char* what) {
  if (corpus.dialogue_ids().size() < 2) {
    throw PreconditionError(std::string(what) + " needs at least two dialogues to sample foreign negatives");
  }
}

template <typename T>
std::vector<T> flatten(std::vector<std::vector<T>> parts) {
  std::vector<T> out;
  for (auto& p : parts) std::move(p.begin(), p.end(), std::back_inserter(out));
  return out;
}

// History indices with p > threshold other than `exclude`, most dependent
// first. Ties keep the seeded order in `tiebreak`.
std::vector<std::size_t> ranked_dependent(const std::vector<double>& probs, const std::vector<std::size_t>& tiebreak,
                                          double threshold, std::optional<std::size_t> exclude) {
  std::vector<std::size_t> out;
  for (auto k : tiebreak) {
    if (probs[k] > threshold && k != exclude) out.push_back(k);
  }
  std::stable_sort(out.begin(), out.end(), [&](std::size_t a, std::size_t b) { return probs[a] > probs[b]; });
  return out;
}

std::vector<std::size_t> seeded_order(std::size_t n, Rng& rng) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  rng.shuffle(std::span<std::size_t>(order));
  return order;
}

json ref_json(const UtteranceRef& r) { return {{"dialogue_id", r.dialogue_id}, {"index", r.index}, {"text", r.text}}; }

UtteranceRef ref_from_json(const json& j) {
  return {j.at("dialogue_id").get<std::string>(), j.at("index").get<std::size_t>(), j.at("text").get<std::string>()};
}

std::string example_line(const Query& q, int label, std::string_view provenance, std::optional<double> cond_prob) {
  json j = {{"task", to_string(q.task)},
            {"candidate", ref_json(q.candidate)},
            {"conditioning", q.conditioning ? ref_json(*q.conditioning) : json(nullptr)},
            {"response", ref_json(q.response)},
            {"label", label},
            {"provenance", provenance},
            {"conditioning_prob", cond_prob ? json(*cond_prob) : json(nullptr)},
            {"input", q.serialize()}};
  return j.dump();
}

}  // namespace

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::annotated_cause: return "annotated_cause";
    case Provenance::preceding: return "preceding";
    case Provenance::random_negative: return "random_negative";
    case Provenance::non_cause: return "non_cause";
    case Provenance::pseudo_label: return "pseudo_label";
  }
  return "unknown";
}

Provenance parse_provenance(std::string_view name) {
  for (auto p : {Provenance::annotated_cause, Provenance::preceding, Provenance::random_negative,
                 Provenance::non_cause, Provenance::pseudo_label}) {
    if (to_string(p) == name) return p;
  }
  throw ParseError("unknown provenance '" + std::string(name) + "'");
}

Example LabeledPair::to_example() const {
  return {Query{Task::uncond, candidate, std::nullopt, response}, label, std::string(to_string(provenance))};
}

Example LabeledTriple::to_example() const {
  return {Query{Task::cond, candidate, conditioning, response}, label, std::string(to_string(provenance))};
}

std::vector<LabeledPair> build_uncond_dataset(const Corpus& corpus, std::size_t negative_ratio, std::uint64_t seed,
                                              std::size_t jobs) {
  require_two_dialogues(corpus, "build_uncond_dataset");
  const UtterancePool pool(corpus);
  const auto& pairs = corpus.pairs();
  auto parts = parallel_map(pairs.size(), jobs, [&](std::size_t p) {
    const auto& pair = pairs[p];
    const auto response = ref_of(pair.dialogue_id, pair.response);
    std::vector<LabeledPair> out;
    std::vector<std::size_t> cause_indices;
    for (const auto& c : pair.causes) cause_indices.push_back(c.utterance_index);
    std::sort(cause_indices.begin(), cause_indices.end());
    for (auto i : cause_indices) {
      out.push_back({ref_of(pair.dialogue_id, pair.history[i]), response, 1, Provenance::annotated_cause});
    }
    const auto preceding = pair.response_index - 1;
    if (!pair.is_cause(preceding)) {
      out.push_back({ref_of(pair.dialogue_id, pair.history[preceding]), response, 1, Provenance::preceding});
    }
    const std::size_t positives = out.size();
    Rng rng(derive_seed(seed, pair.dialogue_id, pair.response_index));
    for (std::size_t k = 0; k < positives * negative_ratio; ++k) {
      out.push_back({out[k % positives].candidate, pool.sample_foreign(pair.dialogue_id, rng), 0,
                     Provenance::random_negative});
    }
    return out;
  });
  return flatten(std::move(parts));
}

CondDataset build_cond_dataset(const Corpus& corpus, const DependenceBackend& uncond_backend, std::uint64_t seed,
                               const CondDatasetOptions& options) {
  struct PairResult {
    std::vector<LabeledTriple> examples;
    std::optional<SkipRecord> skip;
  };
  const auto& pairs = corpus.pairs();
  auto parts = parallel_map(pairs.size(), options.jobs, [&](std::size_t p) {
    const auto& pair = pairs[p];
    PairResult result;
    auto skip = [&](std::string reason) {
      result.skip = SkipRecord{pair.dialogue_id, pair.response_index, std::move(reason)};
      return result;
    };
    if (pair.causes.empty()) return skip("no annotated cause");

    std::vector<Query> queries;
    for (std::size_t i = 0; i < pair.history.size(); ++i) queries.push_back(uncond_query(pair, i));
    const auto probs = uncond_backend.predict_batch(queries);
    Rng rng(derive_seed(seed, pair.dialogue_id, pair.response_index));
    const auto tiebreak = seeded_order(pair.history.size(), rng);

    const auto response = ref_of(pair.dialogue_id, pair.response);
    auto triple = [&](std::size_t cand, std::size_t cond, int label, Provenance prov) {
      return LabeledTriple{ref_of(pair.dialogue_id, pair.history[cand]), ref_of(pair.dialogue_id, pair.history[cond]),
                           response, label, prov, probs[cond]};
    };

    std::vector<std::size_t> causes;
    for (const auto& c : pair.causes) causes.push_back(c.utterance_index);
    std::sort(causes.begin(), causes.end());

    std::optional<std::size_t> primary;
    for (auto cause : causes) {
      auto eligible = ranked_dependent(probs, tiebreak, options.dependence_threshold, cause);
      if (eligible.size() > options.max_conditioning_per_pair) eligible.resize(options.max_conditioning_per_pair);
      for (auto cond : eligible) {
        if (!primary) primary = cond;
        result.examples.push_back(triple(cause, cond, 1, Provenance::annotated_cause));
      }
    }
    if (!primary) return skip("no unconditionally dependent conditioning utterance distinct from a cause");

    for (std::size_t n = 0; n < pair.history.size(); ++n) {
      if (pair.is_cause(n)) continue;
      std::optional<std::size_t> cond;
      if (*primary != n) {
        cond = primary;
      } else if (auto alt = ranked_dependent(probs, tiebreak, options.dependence_threshold, n); !alt.empty()) {
        cond = alt.front();
      }
      if (!cond) {
        log::info("build_cond_dataset: dialogue " + pair.dialogue_id + " response " +
                  std::to_string(pair.response_index) + ": no conditioning for negative candidate " +
                  std::to_string(n));
        continue;
      }
      result.examples.push_back(triple(n, *cond, 0, Provenance::non_cause));
    }
    return result;
  });

  CondDataset out;
  for (auto& part : parts) {
    if (part.skip) {
      log::info("build_cond_dataset: skipped dialogue " + part.skip->dialogue_id + " response " +
                std::to_string(part.skip->response_index) + ": " + part.skip->reason);
      out.skipped.push_back(std::move(*part.skip));
    }
    std::move(part.examples.begin(), part.examples.end(), std::back_inserter(out.examples));
  }
  return out;
}

std::vector<LabeledTriple> build_preced2_dataset(const Corpus& corpus, std::uint64_t seed, std::size_t jobs) {
  require_two_dialogues(corpus, "build_preced2_dataset");
  const UtterancePool pool(corpus);
  const auto& pairs = corpus.pairs();
  auto parts = parallel_map(pairs.size(), jobs, [&](std::size_t p) {
    const auto& pair = pairs[p];
    const auto response = ref_of(pair.dialogue_id, pair.response);
    const auto last = ref_of(pair.dialogue_id, pair.history[pair.response_index - 1]);
    std::vector<LabeledTriple> out;
    if (pair.response_index >= 2) {
      const auto second = ref_of(pair.dialogue_id, pair.history[pair.response_index - 2]);
      out.push_back({last, second, response, 1, Provenance::preceding, std::nullopt});
      out.push_back({second, last, response, 1, Provenance::preceding, std::nullopt});
    } else {
      out.push_back({last, std::nullopt, response, 1, Provenance::preceding, std::nullopt});
    }
    Rng rng(derive_seed(seed, pair.dialogue_id, pair.response_index));
    for (int k = 0; k < 2; ++k) {
      out.push_back({pool.sample_foreign(pair.dialogue_id, rng), last, response, 0, Provenance::random_negative,
                     std::nullopt});
    }
    return out;
  });
  return flatten(std::move(parts));
}

std::vector<Query> build_unlabeled_triples(const Corpus& corpus, const DependenceBackend& uncond_backend,
                                           std::uint64_t seed, const CondDatasetOptions& options) {
  const auto& pairs = corpus.pairs();
  auto parts = parallel_map(pairs.size(), options.jobs, [&](std::size_t p) {
    const auto& pair = pairs[p];
    std::vector<Query> queries;
    for (std::size_t i = 0; i < pair.history.size(); ++i) queries.push_back(uncond_query(pair, i));
    const auto probs = uncond_backend.predict_batch(queries);
    Rng rng(derive_seed(seed, pair.dialogue_id, pair.response_index));
    const auto tiebreak = seeded_order(pair.history.size(), rng);
    std::vector<Query> out;
    for (std::size_t i = 0; i < pair.history.size(); ++i) {
      auto eligible = ranked_dependent(probs, tiebreak, options.dependence_threshold, i);
      if (eligible.size() > options.max_conditioning_per_pair) eligible.resize(options.max_conditioning_per_pair);
      for (auto k : eligible) out.push_back(cond_query(pair, i, k));
    }
    return out;
  });
  return flatten(std::move(parts));
}

std::string to_jsonl(const LabeledPair& p) {
  const auto e = p.to_example();
  return example_line(e.query, e.label, e.provenance, std::nullopt);
}

std::string to_jsonl(const LabeledTriple& t) {
  const auto e = t.to_example();
  return example_line(e.query, e.label, e.provenance, t.conditioning_prob);
}

std::string to_jsonl(const Example& e) { return example_line(e.query, e.label, e.provenance, std::nullopt); }

std::vector<Example> parse_examples(std::istream& in, std::string_view source) {
  std::vector<Example> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    try {
      const auto j = json::parse(line);
      Example e;
      e.query.task = parse_task(j.at("task").get<std::string>());
      e.query.candidate = ref_from_json(j.at("candidate"));
      if (j.contains("conditioning") && !j.at("conditioning").is_null()) {
        e.query.conditioning = ref_from_json(j.at("conditioning"));
      }
      e.query.response = ref_from_json(j.at("response"));
      e.label = j.at("label").get<int>();
      if (e.label != 0 && e.label != 1) throw InvariantError("label must be 0 or 1");
      e.provenance = j.value("provenance", "");
      out.push_back(std::move(e));
    } catch (const json::exception& ex) {
      throw ParseError(std::string(source) + ":" + std::to_string(line_no) + ": " + ex.what());
    } catch (const Error& ex) {
      throw InvariantError(std::string(source) + ":" + std::to_string(line_no) + ": " + ex.what());
    }
  }
  return out;
}

std::vector<Example> load_examples(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open examples file " + path.string());
  return parse_examples(in, path.string());
}

}  // namespace causalscore
