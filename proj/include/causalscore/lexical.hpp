#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "causalscore/classifier.hpp"

namespace causalscore {

// Fixed lexical feature vector of a query, every entry in [0, 1]:
//   0  content-token Jaccard overlap between candidate and response
//   1  share of candidate word tokens that also occur in the response
//   2  candidate recency, 1 / (response index - candidate index); 0 if foreign
//   3  bias (always 1)
// For conditional queries the response tokens also present in the
// conditioning utterance are removed before features 0 and 1, so overlap the
// conditioning already explains does not count.
inline constexpr std::size_t kLexicalFeatures = 4;
using LexicalFeatures = std::array<double, kLexicalFeatures>;

LexicalFeatures lexical_features(const Query& query);

// Logistic model over lexical_features(). Immutable.
class LexicalModel final : public DependenceBackend {
 public:
  LexicalModel(Task task, LexicalFeatures weights);

  Task task() const { return task_; }
  const LexicalFeatures& weights() const { return weights_; }

  // w . features(query); predict() is the logistic sigmoid of this.
  double decision(const Query& query) const;
  double predict(const Query& query) const override;

  std::string to_json() const;
  static LexicalModel from_json(const std::string& json_text);
  static LexicalModel load(const std::filesystem::path& path);

 private:
  Task task_;
  LexicalFeatures weights_;
};

// Routes uncond queries to one backend and cond queries to another.
class TaskRouter final : public DependenceBackend {
 public:
  TaskRouter(std::shared_ptr<const DependenceBackend> uncond, std::shared_ptr<const DependenceBackend> cond);
  double predict(const Query& query) const override;
  std::vector<double> predict_batch(std::span<const Query> queries) const override;

 private:
  std::shared_ptr<const DependenceBackend> uncond_;
  std::shared_ptr<const DependenceBackend> cond_;
};

struct LexicalFit {
  std::shared_ptr<const LexicalModel> model;
  std::vector<double> loss_history;  // mean logistic loss on train, per epoch (index 0 = initial weights)
  ValMetrics val;
};

struct LexicalTrainerOptions {
  std::uint64_t seed = 0;
  std::size_t epochs = 400;
  // Full-batch gradient descent. With features in [0,1]^4 the loss gradient
  // is 1-Lipschitz, so any rate <= 1 keeps the loss non-increasing.
  double learning_rate = 1.0;
};

// Logistic-regression trainer. Throws PreconditionError when the training
// set lacks either class.
class LexicalTrainer final : public Trainer {
 public:
  explicit LexicalTrainer(LexicalTrainerOptions options = {}) : options_(options) {}

  LexicalFit fit(Task task, std::span<const Example> train, std::span<const Example> val,
                 const LexicalModel* init = nullptr) const;

  TrainResult train(Task task, std::span<const Example> train, std::span<const Example> val,
                    const TrainResult* init) const override;

 private:
  LexicalTrainerOptions options_;
};

}  // namespace causalscore
