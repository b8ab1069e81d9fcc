#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "causalscore/classifier.hpp"

namespace causalscore {

enum class SelectionMetric { accuracy, f1 };

struct SelfTrainConfig {
  double pseudo_threshold = 0.9;             // accept only p > threshold
  std::set<std::size_t> position_window{2, 3};  // allowed response_index - candidate_index
  std::size_t max_iterations = 10;           // self-training rounds after the supervised fit
  std::size_t patience = 1;                  // rounds without improvement before stopping
  SelectionMetric selection_metric = SelectionMetric::f1;

  // Throws PreconditionError on out-of-range settings.
  void validate() const;
};

struct PseudoLabel {
  Query query;
  double prob = 0.0;
  std::size_t offset = 0;
};

struct IterationAudit {
  std::size_t iteration = 0;  // 0 is the supervised fit on the labeled set
  std::size_t examined = 0;
  std::size_t accepted = 0;
  std::size_t rejected_by_threshold = 0;
  std::size_t rejected_by_position = 0;
  double val_metric = 0.0;
  ValMetrics val;
  std::size_t training_set_size = 0;  // size of the set this iteration's model was trained on
  std::vector<PseudoLabel> accepted_examples;  // pseudo-labels added before this iteration's fit
};

struct SelfTrainAudit {
  std::vector<IterationAudit> iterations;
  std::size_t best_iteration = 0;
  double best_val_metric = 0.0;
  std::string stop_reason;

  std::string to_json() const;
};

struct SelfTrainResult {
  TrainResult best;
  SelfTrainAudit audit;
  std::vector<Example> final_training_set;
};

// Called after each fit with the iteration number and its result.
using IterationCallback = std::function<void(std::size_t, const TrainResult&)>;

// Incremental self-training with constraints for the conditional classifier.
// Iteration 0 fits on `labeled_train`. Each later round predicts every
// not-yet-accepted unlabeled query with the latest model, adds as positives
// those whose candidate offset lies in the position window and whose
// probability exceeds the threshold, and refits from the latest model on the
// grown set. Stops after `patience` rounds without a validation improvement,
// when a round accepts nothing, when the pool is exhausted, or after
// max_iterations rounds. Returns the model with the best validation metric
// (earliest on ties).
SelfTrainResult self_train(const Trainer& trainer, std::span<const Example> labeled_train,
                           std::span<const Example> labeled_val, std::span<const Query> unlabeled,
                           const SelfTrainConfig& config, const IterationCallback& on_iteration = {});

}  // namespace causalscore
