#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "causalscore/classifier.hpp"
#include "causalscore/corpus.hpp"

namespace causalscore {

inline constexpr double kDependenceThreshold = 0.5;

// Classifier outputs for one (history, response) pair.
struct DependenceProbe {
  std::vector<double> uncond;         // p+(c_i, r) for every history index i
  std::vector<std::size_t> dep_set;   // ascending indices with uncond > threshold
  std::map<std::pair<std::size_t, std::size_t>, double> cond;  // p+(c_i, c_j, r), i != j, both in dep_set

  // Throws InvariantError if any probability leaves [0,1] or a cond key is
  // outside dep_set x dep_set minus the diagonal.
  void validate() const;
};

// Builds a probe from raw values; dep_set is derived from `uncond` with a
// strict > threshold test.
DependenceProbe make_probe(std::vector<double> uncond, std::map<std::pair<std::size_t, std::size_t>, double> cond,
                           double threshold = kDependenceThreshold);

// Queries the backend for every history utterance, then for every ordered
// pair of dependent utterances. Throws PreconditionError on an empty history;
// backend errors are rethrown as BackendError carrying the pair locator.
DependenceProbe probe(const HistoryResponsePair& pair, const DependenceBackend& backend,
                      double threshold = kDependenceThreshold);

enum class ScoreMode { full, uncond_only, cond_only, max_ci };

std::string_view to_string(ScoreMode mode);
ScoreMode parse_score_mode(std::string_view name);
inline constexpr ScoreMode kAllModes[] = {ScoreMode::full, ScoreMode::uncond_only, ScoreMode::cond_only,
                                          ScoreMode::max_ci};

struct Aggregate {
  double score = 0.0;
  std::size_t dep_size = 0;
  double uncond_avg = 0.0;  // mean uncond over dep_set (all history when dep_set is empty)
  double cond_avg = 0.0;    // conditional component: mean over ordered pairs, max for max_ci
  bool degenerate = false;  // dep_set had fewer than two members
};

// full        = (uncond_avg + mean cond) / 2
// uncond_only = uncond_avg
// cond_only   = mean cond
// max_ci      = (uncond_avg + max cond) / 2
// With |dep_set| < 2 there are no ordered pairs; the conditional component
// takes the unconditional one, and with |dep_set| = 0 the unconditional mean
// runs over the whole history. Both cases are flagged degenerate.
Aggregate aggregate(const DependenceProbe& probe, ScoreMode mode);

struct ScoreRow {
  std::string dialogue_id;
  std::size_t response_index = 0;
  ScoreMode mode = ScoreMode::full;
  Aggregate value;
};

struct ScoreError {
  std::string dialogue_id;
  std::size_t response_index = 0;
  std::string message;
};

struct ScoreReport {
  std::vector<ScoreRow> rows;  // corpus order, then mode order as requested
  std::vector<ScoreError> errors;
};

struct ScoreOptions {
  double threshold = kDependenceThreshold;
  std::size_t jobs = 1;
};

// Probes each pair once and aggregates it in every requested mode. A failing
// pair yields an error record; the remaining pairs are still scored.
ScoreReport score_corpus(const Corpus& corpus, const DependenceBackend& backend, std::span<const ScoreMode> modes,
                         const ScoreOptions& options = {});

inline constexpr std::string_view kScoreCsvHeader =
    "dialogue_id,response_index,mode,score,dep_size,uncond_avg,cond_avg,degenerate";

void write_score_csv(std::ostream& out, const ScoreReport& report);
void write_score_jsonl(std::ostream& out, const ScoreReport& report);

// Reads rows back from either format (JSON Lines when the first non-blank
// character is '{').
std::vector<ScoreRow> parse_score_rows(std::istream& in, std::string_view source = "<stream>");
std::vector<ScoreRow> load_score_rows(const std::filesystem::path& path);

// Counts over `bins` equal-width bins on [0,1]; the last bin is closed so a
// score of exactly 1 lands in it. Throws PreconditionError when bins == 0.
std::vector<std::size_t> score_histogram(std::span<const double> scores, std::size_t bins);
void write_histogram_csv(std::ostream& out, std::span<const std::size_t> counts);

}  // namespace causalscore
