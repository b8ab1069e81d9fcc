#include "causalscore/remote.hpp"

#include <cstdlib>

#include <httplib.h>
#include <json.hpp>

#include "causalscore/error.hpp"
#include "causalscore/log.hpp"

namespace causalscore {
namespace {

using nlohmann::json;

httplib::Client make_client(const RemoteConfig& config) {
  if (config.endpoint.empty()) throw PreconditionError("remote backend needs an endpoint");
  httplib::Client client(config.endpoint);
  if (!client.is_valid()) throw PreconditionError("invalid endpoint " + config.endpoint);
  client.set_connection_timeout(config.timeout);
  client.set_read_timeout(config.timeout);
  client.set_write_timeout(config.timeout);
  return client;
}

// Issues the request up to 1 + retries times. Transport failures and 5xx
// answers are retried; anything else is returned to the caller.
template <typename Send>
httplib::Result with_retries(const RemoteConfig& config, const std::string& what, Send send) {
  std::string last_error;
  for (std::size_t attempt = 0; attempt <= config.retries; ++attempt) {
    auto result = send();
    if (!result) {
      last_error = httplib::to_string(result.error());
    } else if (result->status >= 500) {
      last_error = "HTTP " + std::to_string(result->status);
    } else {
      return result;
    }
    if (attempt < config.retries) log::warn(what + " attempt " + std::to_string(attempt + 1) + " failed: " + last_error);
  }
  throw TransportError(what + " failed after " + std::to_string(config.retries + 1) + " attempts: " + last_error);
}

json parse_reply(const httplib::Result& result, const std::string& what) {
  if (result->status != 200) {
    throw ProtocolError(what + ": HTTP " + std::to_string(result->status) + " " + result->body);
  }
  try {
    return json::parse(result->body);
  } catch (const json::exception& e) {
    throw ProtocolError(what + ": reply is not JSON: " + e.what());
  }
}

json examples_to_json(std::span<const Example> examples) {
  json arr = json::array();
  for (const auto& e : examples) arr.push_back({{"input", e.query.serialize()}, {"label", e.label}});
  return arr;
}

}  // namespace

std::optional<std::string> endpoint_from_env() {
  if (const char* v = std::getenv("CAUSALSCORE_ENDPOINT"); v != nullptr && *v != '\0') return std::string(v);
  return std::nullopt;
}

std::vector<double> remote_classify(const RemoteConfig& config, Task task, std::span<const std::string> inputs) {
  std::vector<double> out;
  out.reserve(inputs.size());
  if (inputs.empty()) return out;
  if (config.batch_size == 0) throw PreconditionError("batch_size must be positive");
  auto client = make_client(config);
  for (std::size_t begin = 0; begin < inputs.size(); begin += config.batch_size) {
    const auto count = std::min(config.batch_size, inputs.size() - begin);
    const json body = {{"task", to_string(task)},
                       {"inputs", std::vector<std::string>(inputs.begin() + begin, inputs.begin() + begin + count)}};
    const std::string payload = body.dump();
    const std::string what = "classify batch at " + std::to_string(begin);
    auto result = with_retries(config, what, [&] { return client.Post("/v1/classify", payload, "application/json"); });
    const auto reply = parse_reply(result, what);
    if (!reply.is_object() || !reply.contains("probs") || !reply.at("probs").is_array()) {
      throw ProtocolError(what + ": reply lacks a probs array");
    }
    const auto& probs = reply.at("probs");
    if (probs.size() != count) {
      throw ProtocolError(what + ": expected " + std::to_string(count) + " probabilities, got " +
                          std::to_string(probs.size()));
    }
    for (const auto& p : probs) {
      if (!p.is_number()) throw ProtocolError(what + ": non-numeric probability");
      out.push_back(checked_probability(p.get<double>(), what));
    }
  }
  return out;
}

RemoteTrainResult remote_train(const RemoteConfig& config, Task task, std::span<const Example> train,
                               std::span<const Example> val, const std::optional<std::string>& init_model) {
  auto client = make_client(config);
  json body = {{"task", to_string(task)},
               {"train", examples_to_json(train)},
               {"val", examples_to_json(val)},
               {"init_model", init_model ? json(*init_model) : json(nullptr)}};
  const std::string payload = body.dump();
  auto result = with_retries(config, "train", [&] { return client.Post("/v1/train", payload, "application/json"); });
  const auto reply = parse_reply(result, "train");
  try {
    RemoteTrainResult out;
    out.model_id = reply.at("model_id").get<std::string>();
    out.val.accuracy = reply.at("val_metrics").at("accuracy").get<double>();
    out.val.f1 = reply.at("val_metrics").at("f1").get<double>();
    return out;
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("train: malformed reply: ") + e.what());
  }
}

void remote_health(const RemoteConfig& config) {
  auto client = make_client(config);
  auto result = with_retries(config, "health", [&] { return client.Get("/v1/health"); });
  const auto reply = parse_reply(result, "health");
  if (!reply.is_object() || reply.value("status", "") != "ok") throw ProtocolError("health: status is not ok");
}

double RemoteBackend::predict(const Query& query) const {
  const Query one[] = {query};
  return predict_batch(one).at(0);
}

std::vector<double> RemoteBackend::predict_batch(std::span<const Query> queries) const {
  std::vector<std::string> uncond, cond;
  for (const auto& q : queries) (q.task == Task::uncond ? uncond : cond).push_back(q.serialize());
  const auto pu = remote_classify(config_, Task::uncond, uncond);
  const auto pc = remote_classify(config_, Task::cond, cond);
  std::vector<double> out;
  out.reserve(queries.size());
  std::size_t iu = 0, ic = 0;
  for (const auto& q : queries) out.push_back(q.task == Task::uncond ? pu[iu++] : pc[ic++]);
  return out;
}

TrainResult RemoteTrainer::train(Task task, std::span<const Example> train, std::span<const Example> val,
                                 const TrainResult* init) const {
  std::optional<std::string> init_model;
  if (init != nullptr) init_model = init->checkpoint;
  const auto r = remote_train(config_, task, train, val, init_model);
  TrainResult out;
  out.model = std::make_shared<const RemoteBackend>(config_);
  out.val = r.val;
  out.checkpoint = r.model_id;
  return out;
}

}  // namespace causalscore
