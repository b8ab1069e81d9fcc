#include "causalscore/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "causalscore/error.hpp"
#include "causalscore/log.hpp"
#include "causalscore/random.hpp"
#include "causalscore/text.hpp"

namespace causalscore {

using nlohmann::json;

namespace {

std::string locator(const HistoryResponsePair& pair) {
  return "record (dialogue_id=" + pair.dialogue_id + ", response_index=" + std::to_string(pair.response_index) +
         ")";
}

void check_utterance(const Utterance& u, std::size_t expected_index, const HistoryResponsePair& pair) {
  if (u.index != expected_index) {
    throw InvariantError(locator(pair) + ": utterance index " + std::to_string(u.index) + " at position " +
                         std::to_string(expected_index));
  }
  if (text::trim(u.text).empty()) {
    throw InvariantError(locator(pair) + ": utterance " + std::to_string(u.index) + " has empty text");
  }
}

HistoryResponsePair record_from_json(const json& j) {
  HistoryResponsePair pair;
  pair.dialogue_id = j.at("dialogue_id").get<std::string>();
  const auto response_index = j.at("response_index").get<std::int64_t>();
  if (response_index < 1) {
    throw InvariantError("record (dialogue_id=" + pair.dialogue_id + ", response_index=" +
                         std::to_string(response_index) + "): response_index must be >= 1");
  }
  pair.response_index = static_cast<std::size_t>(response_index);
  const auto& utterances = j.at("utterances");
  if (!utterances.is_array() || utterances.size() != pair.response_index + 1) {
    throw InvariantError(locator(pair) + ": expected " + std::to_string(pair.response_index + 1) +
                         " utterances (history plus response), found " +
                         std::to_string(utterances.is_array() ? utterances.size() : 0));
  }
  for (std::size_t i = 0; i < utterances.size(); ++i) {
    Utterance u{i, utterances[i].at("speaker").get<std::string>(), utterances[i].at("text").get<std::string>()};
    if (i == pair.response_index) {
      pair.response = std::move(u);
    } else {
      pair.history.push_back(std::move(u));
    }
  }
  if (j.contains("causes")) {
    for (const auto& c : j.at("causes")) {
      const auto idx = c.at("utterance_index").get<std::int64_t>();
      if (idx < 0) throw InvariantError(locator(pair) + ": negative cause index");
      CauseAnnotation cause{static_cast<std::size_t>(idx), {}};
      if (c.contains("clause_spans") && !c.at("clause_spans").is_null()) {
        for (const auto& s : c.at("clause_spans")) {
          const auto start = s.at(0).get<std::int64_t>();
          const auto end = s.at(1).get<std::int64_t>();
          if (start < 0 || end < 0) throw InvariantError(locator(pair) + ": negative span bound");
          cause.clause_spans.push_back({static_cast<std::size_t>(start), static_cast<std::size_t>(end)});
        }
      }
      pair.causes.push_back(std::move(cause));
    }
  }
  return pair;
}

json record_to_json(const HistoryResponsePair& pair) {
  json utterances = json::array();
  for (const auto& u : pair.history) utterances.push_back({{"speaker", u.speaker}, {"text", u.text}});
  utterances.push_back({{"speaker", pair.response.speaker}, {"text", pair.response.text}});
  json causes = json::array();
  for (const auto& c : pair.causes) {
    json spans = json::array();
    for (const auto& s : c.clause_spans) spans.push_back({s.start, s.end});
    causes.push_back({{"utterance_index", c.utterance_index}, {"clause_spans", spans}});
  }
  return {{"dialogue_id", pair.dialogue_id},
          {"response_index", pair.response_index},
          {"utterances", utterances},
          {"causes", causes}};
}

std::size_t cause_tokens(const HistoryResponsePair& pair, const CauseAnnotation& cause) {
  const auto& utterance = pair.history.at(cause.utterance_index).text;
  if (cause.clause_spans.empty()) return text::whitespace_tokens(utterance).size();
  std::size_t n = 0;
  for (const auto& s : cause.clause_spans) {
    n += text::whitespace_tokens(text::utf8_slice(utterance, s.start, s.end)).size();
  }
  return n;
}

double cause_fraction(const HistoryResponsePair& pair, const CauseAnnotation& cause) {
  if (cause.clause_spans.empty()) return 1.0;
  const auto total = text::utf8_length(pair.history.at(cause.utterance_index).text);
  std::size_t covered = 0;
  for (const auto& s : cause.clause_spans) covered += s.length();
  return static_cast<double>(covered) / static_cast<double>(total);
}

struct Moments {
  std::size_t n = 0;
  double mean = 0.0;
  double stddev = 0.0;
};

Moments moments(const std::vector<double>& xs) {
  Moments m;
  m.n = xs.size();
  if (xs.empty()) return m;
  double sum = 0.0;
  for (double x : xs) sum += x;
  m.mean = sum / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - m.mean) * (x - m.mean);
  m.stddev = std::sqrt(ss / static_cast<double>(xs.size()));
  return m;
}

std::pair<double, double> pool(std::size_t na, double ma, double sa, std::size_t nb, double mb, double sb) {
  const double n = static_cast<double>(na + nb);
  if (na + nb == 0) return {0.0, 0.0};
  const double wa = static_cast<double>(na) / n;
  const double wb = static_cast<double>(nb) / n;
  const double mean = wa * ma + wb * mb;
  const double second = wa * (sa * sa + ma * ma) + wb * (sb * sb + mb * mb);
  return {mean, std::sqrt(std::max(0.0, second - mean * mean))};
}

}  // namespace

bool HistoryResponsePair::is_cause(std::size_t utterance_index) const {
  return std::any_of(causes.begin(), causes.end(),
                     [&](const CauseAnnotation& c) { return c.utterance_index == utterance_index; });
}

void validate(const HistoryResponsePair& pair) {
  if (pair.response_index < 1) throw InvariantError(locator(pair) + ": response_index must be >= 1");
  if (pair.history.size() != pair.response_index) {
    throw InvariantError(locator(pair) + ": history length " + std::to_string(pair.history.size()) +
                         " does not match response_index");
  }
  for (std::size_t i = 0; i < pair.history.size(); ++i) check_utterance(pair.history[i], i, pair);
  check_utterance(pair.response, pair.response_index, pair);

  std::set<std::size_t> seen;
  for (const auto& cause : pair.causes) {
    if (cause.utterance_index >= pair.response_index) {
      throw InvariantError(locator(pair) + ": cause index " + std::to_string(cause.utterance_index) +
                           " is not before the response");
    }
    if (!seen.insert(cause.utterance_index).second) {
      throw InvariantError(locator(pair) + ": duplicate cause index " + std::to_string(cause.utterance_index));
    }
    const auto length = text::utf8_length(pair.history[cause.utterance_index].text);
    std::size_t previous_end = 0;
    for (const auto& span : cause.clause_spans) {
      if (span.start >= span.end || span.end > length) {
        throw InvariantError(locator(pair) + ": span [" + std::to_string(span.start) + "," +
                             std::to_string(span.end) + ") outside utterance " +
                             std::to_string(cause.utterance_index) + " of length " + std::to_string(length));
      }
      if (span.start < previous_end) {
        throw InvariantError(locator(pair) + ": spans of utterance " + std::to_string(cause.utterance_index) +
                             " overlap or are unsorted");
      }
      previous_end = span.end;
    }
  }
}

Corpus Corpus::from_pairs(std::vector<HistoryResponsePair> pairs) {
  for (const auto& p : pairs) validate(p);
  std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) {
    return std::tie(a.dialogue_id, a.response_index) < std::tie(b.dialogue_id, b.response_index);
  });
  for (std::size_t i = 1; i < pairs.size(); ++i) {
    if (pairs[i].dialogue_id == pairs[i - 1].dialogue_id && pairs[i].response_index == pairs[i - 1].response_index) {
      throw InvariantError(locator(pairs[i]) + ": duplicate record");
    }
  }
  Corpus c;
  c.pairs_ = std::move(pairs);
  return c;
}

std::vector<std::string> Corpus::dialogue_ids() const {
  std::vector<std::string> ids;
  for (const auto& p : pairs_) {
    if (ids.empty() || ids.back() != p.dialogue_id) ids.push_back(p.dialogue_id);
  }
  return ids;
}

Corpus parse_corpus(std::istream& in, std::string_view source) {
  std::vector<HistoryResponsePair> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    const std::string where = std::string(source) + ":" + std::to_string(line_no);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError(where + ": " + e.what());
    }
    try {
      pairs.push_back(record_from_json(j));
      validate(pairs.back());
    } catch (const json::exception& e) {
      throw ParseError(where + ": " + e.what());
    } catch (const InvariantError& e) {
      throw InvariantError(where + ": " + e.what());
    }
  }
  if (pairs.empty()) log::warn(std::string(source) + ": corpus is empty");
  try {
    return Corpus::from_pairs(std::move(pairs));
  } catch (const InvariantError& e) {
    throw InvariantError(std::string(source) + ": " + e.what());
  }
}

Corpus load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open corpus file " + path.string());
  return parse_corpus(in, path.string());
}

std::string serialize_record(const HistoryResponsePair& pair) { return record_to_json(pair).dump(); }

void write_corpus(std::ostream& out, const Corpus& corpus) {
  for (const auto& p : corpus.pairs()) out << serialize_record(p) << '\n';
}

void save_corpus(const std::filesystem::path& path, const Corpus& corpus) {
  std::ofstream out(path);
  if (!out) throw PreconditionError("cannot write " + path.string());
  write_corpus(out, corpus);
}

Corpus concat(const Corpus& a, const Corpus& b) {
  auto pairs = a.pairs();
  pairs.insert(pairs.end(), b.pairs().begin(), b.pairs().end());
  return Corpus::from_pairs(std::move(pairs));
}

CorpusStats corpus_stats(const Corpus& corpus) {
  CorpusStats stats;
  stats.pair_count = corpus.size();
  std::set<std::pair<std::string_view, std::size_t>> utterances;
  std::vector<double> lengths;
  std::vector<double> fractions;
  for (const auto& pair : corpus.pairs()) {
    for (const auto& u : pair.history) utterances.emplace(pair.dialogue_id, u.index);
    utterances.emplace(pair.dialogue_id, pair.response.index);
    for (const auto& cause : pair.causes) {
      lengths.push_back(static_cast<double>(cause_tokens(pair, cause)));
      fractions.push_back(cause_fraction(pair, cause));
    }
  }
  stats.utterance_count = utterances.size();
  stats.direct_cause_utterance_count = lengths.size();
  const auto lm = moments(lengths);
  const auto fm = moments(fractions);
  stats.mean_cause_length_tokens = lm.mean;
  stats.stddev_cause_length_tokens = lm.stddev;
  stats.mean_cause_fraction = fm.mean;
  stats.stddev_cause_fraction = fm.stddev;
  return stats;
}

CorpusStats combine(const CorpusStats& a, const CorpusStats& b) {
  CorpusStats out;
  out.pair_count = a.pair_count + b.pair_count;
  out.utterance_count = a.utterance_count + b.utterance_count;
  out.direct_cause_utterance_count = a.direct_cause_utterance_count + b.direct_cause_utterance_count;
  const auto na = a.direct_cause_utterance_count;
  const auto nb = b.direct_cause_utterance_count;
  std::tie(out.mean_cause_length_tokens, out.stddev_cause_length_tokens) =
      pool(na, a.mean_cause_length_tokens, a.stddev_cause_length_tokens, nb, b.mean_cause_length_tokens,
           b.stddev_cause_length_tokens);
  std::tie(out.mean_cause_fraction, out.stddev_cause_fraction) = pool(
      na, a.mean_cause_fraction, a.stddev_cause_fraction, nb, b.mean_cause_fraction, b.stddev_cause_fraction);
  return out;
}

CorpusSplit split_corpus(const Corpus& corpus, std::size_t train_n, std::size_t val_n, std::size_t test_n,
                         std::uint64_t seed) {
  if (train_n + val_n + test_n > corpus.size()) {
    throw PreconditionError("split of " + std::to_string(train_n) + "/" + std::to_string(val_n) + "/" +
                            std::to_string(test_n) + " exceeds corpus of " + std::to_string(corpus.size()) +
                            " pairs");
  }
  std::map<std::string, std::vector<const HistoryResponsePair*>> by_dialogue;
  for (const auto& p : corpus.pairs()) by_dialogue[p.dialogue_id].push_back(&p);
  std::vector<std::string> order;
  for (const auto& [id, _] : by_dialogue) order.push_back(id);
  Rng rng(seed);
  rng.shuffle(std::span<std::string>(order));

  // Picks the earliest-in-order subset of `remaining` whose sizes sum to target.
  auto take = [&](std::vector<std::string>& remaining, std::size_t target, const char* name) {
    const std::size_t m = remaining.size();
    // reachable[i][s]: some subset of remaining[i..] sums to s
    std::vector<std::vector<char>> reachable(m + 1, std::vector<char>(target + 1, 0));
    reachable[m][0] = 1;
    for (std::size_t i = m; i-- > 0;) {
      const auto w = by_dialogue[remaining[i]].size();
      for (std::size_t s = 0; s <= target; ++s) {
        reachable[i][s] = reachable[i + 1][s] || (w <= s && reachable[i + 1][s - w]);
      }
    }
    if (!reachable[0][target]) {
      throw PreconditionError(std::string("cannot form a ") + name + " split of exactly " +
                              std::to_string(target) + " pairs from whole dialogues");
    }
    std::vector<HistoryResponsePair> chosen;
    std::vector<std::string> rest;
    std::size_t s = target;
    for (std::size_t i = 0; i < m; ++i) {
      const auto& group = by_dialogue[remaining[i]];
      if (group.size() <= s && reachable[i + 1][s - group.size()]) {
        for (const auto* p : group) chosen.push_back(*p);
        s -= group.size();
      } else {
        rest.push_back(remaining[i]);
      }
    }
    remaining = std::move(rest);
    return Corpus::from_pairs(std::move(chosen));
  };

  CorpusSplit split;
  split.train = take(order, train_n, "train");
  split.validation = take(order, val_n, "validation");
  split.test = take(order, test_n, "test");
  return split;
}

}  // namespace causalscore
