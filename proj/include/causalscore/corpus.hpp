#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace causalscore {

struct Utterance {
  std::size_t index = 0;  // position within the dialogue
  std::string speaker;
  std::string text;

  friend bool operator==(const Utterance&, const Utterance&) = default;
};

// Half-open code-point range within an utterance's text.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t length() const { return end - start; }
  friend bool operator==(const Span&, const Span&) = default;
};

struct CauseAnnotation {
  std::size_t utterance_index = 0;
  std::vector<Span> clause_spans;  // empty: the whole utterance is the cause

  friend bool operator==(const CauseAnnotation&, const CauseAnnotation&) = default;
};

// One annotated (history, response) record.
struct HistoryResponsePair {
  std::string dialogue_id;
  std::size_t response_index = 0;
  std::vector<Utterance> history;  // utterances 0..response_index-1
  Utterance response;
  std::vector<CauseAnnotation> causes;

  bool is_cause(std::size_t utterance_index) const;
  friend bool operator==(const HistoryResponsePair&, const HistoryResponsePair&) = default;
};

// Pairs sorted by (dialogue_id, response_index), unique on that key.
// Immutable once built; construct through from_pairs or load_corpus.
class Corpus {
 public:
  Corpus() = default;

  // Validates every record and sorts. Throws InvariantError.
  static Corpus from_pairs(std::vector<HistoryResponsePair> pairs);

  const std::vector<HistoryResponsePair>& pairs() const { return pairs_; }
  std::size_t size() const { return pairs_.size(); }
  bool empty() const { return pairs_.empty(); }

  // Distinct dialogue ids in sorted order.
  std::vector<std::string> dialogue_ids() const;

  friend bool operator==(const Corpus&, const Corpus&) = default;

 private:
  std::vector<HistoryResponsePair> pairs_;
};

// Throws InvariantError naming the record if any invariant fails.
void validate(const HistoryResponsePair& pair);

// Parses JSON Lines. `source` is used in error locators. Blank lines are
// skipped; an empty input yields an empty corpus and a logged warning.
Corpus parse_corpus(std::istream& in, std::string_view source = "<stream>");
Corpus load_corpus(const std::filesystem::path& path);

std::string serialize_record(const HistoryResponsePair& pair);
void write_corpus(std::ostream& out, const Corpus& corpus);
void save_corpus(const std::filesystem::path& path, const Corpus& corpus);

// Concatenation of corpora with disjoint keys.
Corpus concat(const Corpus& a, const Corpus& b);

struct CorpusStats {
  std::size_t pair_count = 0;
  std::size_t utterance_count = 0;               // distinct (dialogue_id, index)
  std::size_t direct_cause_utterance_count = 0;  // cause annotations over all pairs
  double mean_cause_length_tokens = 0.0;
  double stddev_cause_length_tokens = 0.0;  // population
  double mean_cause_fraction = 0.0;         // annotated chars / utterance chars
  double stddev_cause_fraction = 0.0;       // population
};

CorpusStats corpus_stats(const Corpus& corpus);

// Merges statistics of two corpora with disjoint dialogues: counts add,
// means and population deviations pool by cause count.
CorpusStats combine(const CorpusStats& a, const CorpusStats& b);

struct CorpusSplit {
  Corpus train;
  Corpus validation;
  Corpus test;
};

// Dialogue-atomic split with exact pair counts. Dialogues are shuffled with
// `seed`, then each part takes a subset of the remaining dialogues whose pair
// counts sum exactly to the request. Throws PreconditionError when the
// request exceeds the corpus or cannot be met at dialogue granularity.
CorpusSplit split_corpus(const Corpus& corpus, std::size_t train_n, std::size_t val_n, std::size_t test_n,
                         std::uint64_t seed);

}  // namespace causalscore
