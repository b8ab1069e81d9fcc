#include "causalscore/selftrain.hpp"

#include <json.hpp>

#include "causalscore/datasets.hpp"
#include "causalscore/error.hpp"
#include "causalscore/log.hpp"

namespace causalscore {
namespace {

double metric_of(const ValMetrics& m, SelectionMetric which) {
  return which == SelectionMetric::f1 ? m.f1 : m.accuracy;
}

}  // namespace

void SelfTrainConfig::validate() const {
  if (!(pseudo_threshold > 0.5 && pseudo_threshold <= 1.0)) {
    throw PreconditionError("pseudo_threshold must lie in (0.5, 1]");
  }
  if (position_window.empty()) throw PreconditionError("position_window must not be empty");
  if (position_window.count(0) != 0) throw PreconditionError("position offsets must be >= 1");
  if (max_iterations < 1) throw PreconditionError("max_iterations must be >= 1");
  if (patience < 1) throw PreconditionError("patience must be >= 1");
}

std::string SelfTrainAudit::to_json() const {
  nlohmann::json iters = nlohmann::json::array();
  for (const auto& it : iterations) {
    nlohmann::json accepted = nlohmann::json::array();
    for (const auto& pl : it.accepted_examples) {
      accepted.push_back({{"dialogue_id", pl.query.response.dialogue_id},
                          {"response_index", pl.query.response.index},
                          {"candidate", pl.query.candidate.index},
                          {"conditioning", pl.query.conditioning ? nlohmann::json(pl.query.conditioning->index)
                                                                 : nlohmann::json(nullptr)},
                          {"offset", pl.offset},
                          {"prob", pl.prob}});
    }
    iters.push_back({{"iteration", it.iteration},
                     {"examined", it.examined},
                     {"accepted", it.accepted},
                     {"rejected_by_threshold", it.rejected_by_threshold},
                     {"rejected_by_position", it.rejected_by_position},
                     {"val_metric", it.val_metric},
                     {"val_accuracy", it.val.accuracy},
                     {"val_f1", it.val.f1},
                     {"training_set_size", it.training_set_size},
                     {"accepted_examples", accepted}});
  }
  nlohmann::json j = {{"iterations", iters},
                      {"best_iteration", best_iteration},
                      {"best_val_metric", best_val_metric},
                      {"stop_reason", stop_reason}};
  return j.dump(2);
}

SelfTrainResult self_train(const Trainer& trainer, std::span<const Example> labeled_train,
                           std::span<const Example> labeled_val, std::span<const Query> unlabeled,
                           const SelfTrainConfig& config, const IterationCallback& on_iteration) {
  config.validate();
  if (labeled_train.empty()) throw PreconditionError("self_train: labeled training set is empty");

  SelfTrainResult out;
  std::vector<Example> data(labeled_train.begin(), labeled_train.end());
  std::vector<Query> pool(unlabeled.begin(), unlabeled.end());

  TrainResult current = trainer.train(Task::cond, data, labeled_val, nullptr);
  if (on_iteration) on_iteration(0, current);
  IterationAudit first;
  first.val = current.val;
  first.val_metric = metric_of(current.val, config.selection_metric);
  first.training_set_size = data.size();
  out.audit.iterations.push_back(first);
  out.best = current;
  out.audit.best_iteration = 0;
  out.audit.best_val_metric = first.val_metric;

  std::size_t stale = 0;
  out.audit.stop_reason = "max_iterations reached";
  for (std::size_t i = 1; i <= config.max_iterations; ++i) {
    if (pool.empty()) {
      out.audit.stop_reason = i == 1 ? "no unlabeled data" : "unlabeled pool exhausted";
      break;
    }
    IterationAudit audit;
    audit.iteration = i;
    audit.examined = pool.size();

    // Position is checked first so off-window queries never reach the model.
    std::vector<std::size_t> in_window;
    for (std::size_t k = 0; k < pool.size(); ++k) {
      const auto offset = pool[k].offset();
      if (offset && config.position_window.count(*offset) != 0) {
        in_window.push_back(k);
      } else {
        ++audit.rejected_by_position;
      }
    }
    std::vector<Query> to_predict;
    for (auto k : in_window) to_predict.push_back(pool[k]);
    const auto probs = current.model->predict_batch(to_predict);

    std::vector<char> accepted(pool.size(), 0);
    for (std::size_t n = 0; n < in_window.size(); ++n) {
      const double p = checked_probability(probs[n], "self_train prediction");
      if (p > config.pseudo_threshold) {
        const auto k = in_window[n];
        accepted[k] = 1;
        audit.accepted_examples.push_back({pool[k], p, *pool[k].offset()});
        data.push_back({pool[k], 1, std::string(to_string(Provenance::pseudo_label))});
      } else {
        ++audit.rejected_by_threshold;
      }
    }
    audit.accepted = audit.accepted_examples.size();

    if (audit.accepted == 0) {
      // Refitting on an unchanged set cannot change the model.
      audit.val = current.val;
      audit.val_metric = metric_of(current.val, config.selection_metric);
      audit.training_set_size = data.size();
      out.audit.iterations.push_back(std::move(audit));
      out.audit.stop_reason = "no pseudo-labels accepted";
      break;
    }
    std::vector<Query> remaining;
    for (std::size_t k = 0; k < pool.size(); ++k) {
      if (!accepted[k]) remaining.push_back(std::move(pool[k]));
    }
    pool = std::move(remaining);

    current = trainer.train(Task::cond, data, labeled_val, &current);
    if (on_iteration) on_iteration(i, current);
    audit.val = current.val;
    audit.val_metric = metric_of(current.val, config.selection_metric);
    audit.training_set_size = data.size();
    log::info("self-train iteration " + std::to_string(i) + ": accepted " + std::to_string(audit.accepted) +
              " of " + std::to_string(audit.examined) + ", training set " + std::to_string(data.size()));
    const double metric = audit.val_metric;
    out.audit.iterations.push_back(std::move(audit));

    if (metric > out.audit.best_val_metric) {
      out.best = current;
      out.audit.best_iteration = i;
      out.audit.best_val_metric = metric;
      stale = 0;
    } else if (++stale >= config.patience) {
      out.audit.stop_reason = "no validation improvement for " + std::to_string(stale) + " iteration(s)";
      break;
    }
  }
  out.final_training_set = std::move(data);
  return out;
}

}  // namespace causalscore
