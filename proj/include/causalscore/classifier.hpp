#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "causalscore/corpus.hpp"

namespace causalscore {

enum class Task { uncond, cond };

std::string_view to_string(Task task);
Task parse_task(std::string_view name);

inline constexpr std::string_view kDelimiter = "</s>";

// Delimiter-joined classifier input. `warnings` is non-empty when a segment
// itself contained the delimiter.
struct SerializedInput {
  std::string text;
  std::vector<std::string> warnings;
};

// candidate + "</s>" + response
SerializedInput serialize_uncond_input(const Utterance& candidate, const Utterance& response);

// candidate + "</s>" + conditioning + "</s>" + response. Throws
// PreconditionError when candidate and conditioning share an index.
SerializedInput serialize_cond_input(const Utterance& candidate, const Utterance& conditioning,
                                     const Utterance& response);

// An utterance located in a corpus.
struct UtteranceRef {
  std::string dialogue_id;
  std::size_t index = 0;
  std::string text;

  friend bool operator==(const UtteranceRef&, const UtteranceRef&) = default;
};

UtteranceRef ref_of(const std::string& dialogue_id, const Utterance& u);

// One classifier question: is `candidate` dependent on `response`
// (optionally given `conditioning`)?
struct Query {
  Task task = Task::uncond;
  UtteranceRef candidate;
  std::optional<UtteranceRef> conditioning;
  UtteranceRef response;

  // response.index - candidate.index when both come from the same dialogue.
  std::optional<std::size_t> offset() const;
  // Wire form; a cond query without conditioning gets an empty middle segment.
  std::string serialize() const;
};

Query uncond_query(const HistoryResponsePair& pair, std::size_t candidate);
Query cond_query(const HistoryResponsePair& pair, std::size_t candidate, std::size_t conditioning);

struct Example {
  Query query;
  int label = 0;
  std::string provenance;
};

struct ValMetrics {
  double accuracy = 0.0;
  double f1 = 0.0;
};

// Accuracy and positive-class F1 of thresholded probabilities (p > 0.5).
ValMetrics binary_metrics(std::span<const double> probs, std::span<const int> labels);

// Probability that the query's candidate is dependent on its response.
// Implementations must be deterministic and safe for concurrent calls.
class DependenceBackend {
 public:
  virtual ~DependenceBackend() = default;

  virtual double predict(const Query& query) const = 0;

  // Default loops over predict(); remote backends override to batch.
  virtual std::vector<double> predict_batch(std::span<const Query> queries) const;

  double predict_uncond(const HistoryResponsePair& pair, std::size_t candidate) const {
    return predict(uncond_query(pair, candidate));
  }
  double predict_cond(const HistoryResponsePair& pair, std::size_t candidate, std::size_t conditioning) const {
    return predict(cond_query(pair, candidate, conditioning));
  }
};

// Throws ProtocolError unless p is finite and within [0, 1].
double checked_probability(double p, std::string_view context);

struct TrainResult {
  std::shared_ptr<const DependenceBackend> model;
  ValMetrics val;
  std::string checkpoint;  // serialized model (weights JSON or remote model id)
};

class Trainer {
 public:
  virtual ~Trainer() = default;
  // `init` is the model to continue from, or null to start fresh.
  virtual TrainResult train(Task task, std::span<const Example> train, std::span<const Example> val,
                            const TrainResult* init) const = 0;
};

}  // namespace causalscore
