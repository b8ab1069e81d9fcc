#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "causalscore/classifier.hpp"

namespace causalscore {

// Client side of the JSON-over-HTTP inference protocol:
//   POST /v1/classify  {"task", "inputs"}                      -> {"probs"}
//   POST /v1/train     {"task", "train", "val", "init_model"}  -> {"model_id", "val_metrics"}
//   GET  /v1/health                                             -> {"status": "ok"}
struct RemoteConfig {
  std::string endpoint;  // scheme://host:port
  std::size_t batch_size = 32;
  std::size_t retries = 3;  // extra attempts after the first on transport failure or 5xx
  std::chrono::milliseconds timeout{30'000};
};

// Endpoint from CAUSALSCORE_ENDPOINT, if set.
std::optional<std::string> endpoint_from_env();

// One probability per input, in input order. Inputs are sent in batches of
// config.batch_size. Throws TransportError or ProtocolError.
std::vector<double> remote_classify(const RemoteConfig& config, Task task, std::span<const std::string> inputs);

struct RemoteTrainResult {
  std::string model_id;
  ValMetrics val;
};

RemoteTrainResult remote_train(const RemoteConfig& config, Task task, std::span<const Example> train,
                               std::span<const Example> val, const std::optional<std::string>& init_model);

// Throws unless the server reports {"status":"ok"}.
void remote_health(const RemoteConfig& config);

// Serializes queries and classifies them remotely. The server answers with
// whichever model it currently serves for the task.
class RemoteBackend final : public DependenceBackend {
 public:
  explicit RemoteBackend(RemoteConfig config) : config_(std::move(config)) {}
  double predict(const Query& query) const override;
  std::vector<double> predict_batch(std::span<const Query> queries) const override;

 private:
  RemoteConfig config_;
};

class RemoteTrainer final : public Trainer {
 public:
  explicit RemoteTrainer(RemoteConfig config) : config_(std::move(config)) {}
  // The checkpoint of the returned result is the server's model id; a
  // non-null `init` continues from init->checkpoint.
  TrainResult train(Task task, std::span<const Example> train, std::span<const Example> val,
                    const TrainResult* init) const override;

 private:
  RemoteConfig config_;
};

}  // namespace causalscore
