#include "causalscore/lexical.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "causalscore/error.hpp"
#include "causalscore/random.hpp"
#include "causalscore/text.hpp"

namespace causalscore {
namespace {

using TokenSet = std::set<std::string>;

TokenSet to_set(std::vector<std::string> tokens) { return {std::make_move_iterator(tokens.begin()), std::make_move_iterator(tokens.end())}; }

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(-z)) without overflow
double softplus_neg(double z) { return z > 0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z)); }

double dot(const LexicalFeatures& w, const LexicalFeatures& x) {
  double s = 0.0;
  for (std::size_t k = 0; k < kLexicalFeatures; ++k) s += w[k] * x[k];
  return s;
}

}  // namespace

LexicalFeatures lexical_features(const Query& query) {
  TokenSet response_content = to_set(text::content_tokens(query.response.text));
  TokenSet response_words = to_set(text::word_tokens(query.response.text));
  if (query.task == Task::cond && query.conditioning) {
    for (const auto& w : text::word_tokens(query.conditioning->text)) {
      response_content.erase(w);
      response_words.erase(w);
    }
  }
  const TokenSet candidate_content = to_set(text::content_tokens(query.candidate.text));
  const auto candidate_words = text::word_tokens(query.candidate.text);

  LexicalFeatures f{};
  std::size_t shared = 0;
  for (const auto& w : candidate_content) shared += response_content.count(w);
  const std::size_t unioned = candidate_content.size() + response_content.size() - shared;
  f[0] = unioned == 0 ? 0.0 : static_cast<double>(shared) / static_cast<double>(unioned);

  std::size_t hits = 0;
  for (const auto& w : candidate_words) hits += response_words.count(w);
  f[1] = candidate_words.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(candidate_words.size());

  const auto offset = query.offset();
  f[2] = offset ? 1.0 / static_cast<double>(*offset) : 0.0;
  f[3] = 1.0;
  return f;
}

LexicalModel::LexicalModel(Task task, LexicalFeatures weights) : task_(task), weights_(weights) {
  for (double w : weights_) {
    if (!std::isfinite(w)) throw InvariantError("lexical model weights must be finite");
  }
}

double LexicalModel::decision(const Query& query) const { return dot(weights_, lexical_features(query)); }

double LexicalModel::predict(const Query& query) const {
  if (query.task != task_) {
    throw BackendError("lexical model trained for task " + std::string(to_string(task_)) + " got a " +
                       std::string(to_string(query.task)) + " query");
  }
  return sigmoid(decision(query));
}

std::string LexicalModel::to_json() const {
  nlohmann::json j = {{"kind", "lexical"}, {"task", to_string(task_)}, {"weights", weights_}};
  return j.dump();
}

LexicalModel LexicalModel::from_json(const std::string& json_text) {
  try {
    const auto j = nlohmann::json::parse(json_text);
    if (j.at("kind").get<std::string>() != "lexical") throw ParseError("not a lexical model");
    return LexicalModel(parse_task(j.at("task").get<std::string>()), j.at("weights").get<LexicalFeatures>());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("lexical model: ") + e.what());
  }
}

LexicalModel LexicalModel::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open model file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

TaskRouter::TaskRouter(std::shared_ptr<const DependenceBackend> uncond, std::shared_ptr<const DependenceBackend> cond)
    : uncond_(std::move(uncond)), cond_(std::move(cond)) {
  if (!uncond_ || !cond_) throw PreconditionError("TaskRouter needs both an uncond and a cond backend");
}

double TaskRouter::predict(const Query& query) const {
  return query.task == Task::uncond ? uncond_->predict(query) : cond_->predict(query);
}

std::vector<double> TaskRouter::predict_batch(std::span<const Query> queries) const {
  std::vector<Query> u, c;
  for (const auto& q : queries) (q.task == Task::uncond ? u : c).push_back(q);
  const auto pu = uncond_->predict_batch(u);
  const auto pc = cond_->predict_batch(c);
  std::vector<double> out;
  out.reserve(queries.size());
  std::size_t iu = 0, ic = 0;
  for (const auto& q : queries) out.push_back(q.task == Task::uncond ? pu.at(iu++) : pc.at(ic++));
  return out;
}

LexicalFit LexicalTrainer::fit(Task task, std::span<const Example> train, std::span<const Example> val,
                               const LexicalModel* init) const {
  const bool has_pos = std::any_of(train.begin(), train.end(), [](const Example& e) { return e.label == 1; });
  const bool has_neg = std::any_of(train.begin(), train.end(), [](const Example& e) { return e.label == 0; });
  if (!has_pos || !has_neg) throw PreconditionError("training set must contain both classes");

  std::vector<LexicalFeatures> xs;
  std::vector<double> ys;
  xs.reserve(train.size());
  for (const auto& e : train) {
    if (e.query.task != task) throw PreconditionError("training example task does not match trainer task");
    xs.push_back(lexical_features(e.query));
    ys.push_back(e.label == 1 ? 1.0 : 0.0);
  }
  const double n = static_cast<double>(xs.size());

  LexicalFeatures w{};
  if (init != nullptr) {
    w = init->weights();
  } else {
    Rng rng(options_.seed);
    for (auto& wk : w) wk = (rng.uniform01() - 0.5) * 0.02;
  }

  auto loss = [&](const LexicalFeatures& weights) {
    double total = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double z = dot(weights, xs[i]);
      total += ys[i] > 0.5 ? softplus_neg(z) : softplus_neg(-z);
    }
    return total / n;
  };

  LexicalFit fit;
  fit.loss_history.push_back(loss(w));
  for (std::size_t epoch = 0; epoch < options_.epochs; ++epoch) {
    LexicalFeatures grad{};
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double r = sigmoid(dot(w, xs[i])) - ys[i];
      for (std::size_t k = 0; k < kLexicalFeatures; ++k) grad[k] += r * xs[i][k];
    }
    for (std::size_t k = 0; k < kLexicalFeatures; ++k) w[k] -= options_.learning_rate * grad[k] / n;
    fit.loss_history.push_back(loss(w));
  }
  fit.model = std::make_shared<const LexicalModel>(task, w);

  std::vector<double> probs;
  std::vector<int> labels;
  for (const auto& e : val) {
    probs.push_back(fit.model->predict(e.query));
    labels.push_back(e.label);
  }
  fit.val = binary_metrics(probs, labels);
  return fit;
}

TrainResult LexicalTrainer::train(Task task, std::span<const Example> train, std::span<const Example> val,
                                  const TrainResult* init) const {
  const LexicalModel* start = nullptr;
  if (init != nullptr) start = dynamic_cast<const LexicalModel*>(init->model.get());
  auto f = fit(task, train, val, start);
  TrainResult result;
  result.checkpoint = f.model->to_json();
  result.model = f.model;
  result.val = f.val;
  return result;
}

}  // namespace causalscore
