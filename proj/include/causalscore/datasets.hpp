#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "causalscore/classifier.hpp"
#include "causalscore/corpus.hpp"

namespace causalscore {

enum class Provenance { annotated_cause, preceding, random_negative, non_cause, pseudo_label };

std::string_view to_string(Provenance p);
Provenance parse_provenance(std::string_view name);

// Training example for the unconditional classifier. Negatives pair a
// history utterance with an utterance from another dialogue standing in as
// the response.
struct LabeledPair {
  UtteranceRef candidate;
  UtteranceRef response;
  int label = 0;
  Provenance provenance = Provenance::annotated_cause;

  Example to_example() const;
};

// Training example for the conditional classifier. `conditioning` is empty
// only for the Preced2 positive of a one-utterance history.
struct LabeledTriple {
  UtteranceRef candidate;
  std::optional<UtteranceRef> conditioning;
  UtteranceRef response;
  int label = 0;
  Provenance provenance = Provenance::annotated_cause;
  std::optional<double> conditioning_prob;  // p(conditioning, response) from the uncond backend

  Example to_example() const;
};

struct SkipRecord {
  std::string dialogue_id;
  std::size_t response_index = 0;
  std::string reason;
};

// Positives: every annotated cause, plus the preceding utterance when it is
// not already a cause. Negatives: negative_ratio per positive, each pairing a
// positive's candidate with a uniformly drawn utterance of another dialogue.
// Throws PreconditionError for corpora with fewer than two dialogues.
std::vector<LabeledPair> build_uncond_dataset(const Corpus& corpus, std::size_t negative_ratio, std::uint64_t seed,
                                              std::size_t jobs = 1);

struct CondDatasetOptions {
  std::size_t max_conditioning_per_pair = 1;
  double dependence_threshold = 0.5;
  std::size_t jobs = 1;
};

struct CondDataset {
  std::vector<LabeledTriple> examples;
  std::vector<SkipRecord> skipped;
};

// Positives (cause, conditioning, response) with the conditioning drawn from
// utterances the backend deems dependent (p > threshold), highest p first.
// Negatives swap in each non-cause history utterance as the candidate and
// keep the positive's conditioning unless it equals the candidate.
CondDataset build_cond_dataset(const Corpus& corpus, const DependenceBackend& uncond_backend, std::uint64_t seed,
                               const CondDatasetOptions& options = {});

// Positives: the two most recent history utterances as candidates, each
// conditioned on the other. Negatives: two utterances from other dialogues,
// conditioned on the most recent history utterance.
std::vector<LabeledTriple> build_preced2_dataset(const Corpus& corpus, std::uint64_t seed, std::size_t jobs = 1);

// Label-free conditional queries for self-training: every history utterance
// as candidate, conditioned on the most dependent other utterance(s).
std::vector<Query> build_unlabeled_triples(const Corpus& corpus, const DependenceBackend& uncond_backend,
                                           std::uint64_t seed, const CondDatasetOptions& options = {});

std::string to_jsonl(const LabeledPair& p);
std::string to_jsonl(const LabeledTriple& t);
std::string to_jsonl(const Example& e);

// Reads JSON Lines written by to_jsonl (any of the three shapes).
std::vector<Example> parse_examples(std::istream& in, std::string_view source = "<stream>");
std::vector<Example> load_examples(const std::filesystem::path& path);

}  // namespace causalscore
