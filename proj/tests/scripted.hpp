#pragma once

#include <atomic>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "causalscore/classifier.hpp"
#include "support.hpp"

namespace testing {

// Trainer with a predeclared schedule: the k-th call returns validation F1
// (and accuracy) schedule[k] and a model answering with prob(query, k). The
// checkpoint names the call so tests can tell models apart.
class ScriptedTrainer final : public causalscore::Trainer {
 public:
  ScriptedTrainer(std::vector<double> schedule, std::function<double(const causalscore::Query&, std::size_t)> prob)
      : schedule_(std::move(schedule)), prob_(std::move(prob)) {}

  causalscore::TrainResult train(causalscore::Task, std::span<const causalscore::Example> train,
                                 std::span<const causalscore::Example>,
                                 const causalscore::TrainResult* init) const override {
    const auto k = calls_.size();
    calls_.push_back({train.begin(), train.end()});
    inits_.push_back(init ? init->checkpoint : "");
    causalscore::TrainResult r;
    const double m = k < schedule_.size() ? schedule_[k] : schedule_.back();
    r.val = {m, m};
    r.checkpoint = "model" + std::to_string(k);
    r.model = std::make_shared<FunctionBackend>([prob = prob_, k](const causalscore::Query& q) { return prob(q, k); });
    return r;
  }

  const std::vector<std::vector<causalscore::Example>>& calls() const { return calls_; }
  const std::vector<std::string>& inits() const { return inits_; }

 private:
  std::vector<double> schedule_;
  std::function<double(const causalscore::Query&, std::size_t)> prob_;
  mutable std::vector<std::vector<causalscore::Example>> calls_;
  mutable std::vector<std::string> inits_;
};

// Conditional query on dialogue `d` with the given candidate / response
// indices; the conditioning is the utterance just before the response.
inline causalscore::Query cond_q(const std::string& d, std::size_t candidate, std::size_t response,
                                 const std::string& tag = "") {
  const std::size_t conditioning = candidate + 1 == response ? candidate - 1 : response - 1;
  return causalscore::Query{causalscore::Task::cond,
                            {d, candidate, tag + " c" + std::to_string(candidate)},
                            causalscore::UtteranceRef{d, conditioning, "k" + std::to_string(conditioning)},
                            {d, response, "r" + std::to_string(response)}};
}

inline std::vector<causalscore::Example> tiny_labeled() {
  return {{cond_q("L", 0, 2), 1, "annotated_cause"}, {cond_q("L", 1, 3), 0, "non_cause"}};
}

}  // namespace testing
