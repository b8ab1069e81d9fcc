#include "causalscore/classifier.hpp"

#include <cmath>

#include "causalscore/error.hpp"
#include "causalscore/log.hpp"
#include "causalscore/text.hpp"

namespace causalscore {
namespace {

void append_segment(SerializedInput& out, std::string_view segment, std::string_view role) {
  if (text::count_occurrences(segment, kDelimiter) > 0) {
    std::string w = std::string(role) + " text contains the delimiter; input has extra segments";
    log::warn(w);
    out.warnings.push_back(std::move(w));
  }
  out.text.append(segment);
}

}  // namespace

std::string_view to_string(Task task) { return task == Task::uncond ? "uncond" : "cond"; }

Task parse_task(std::string_view name) {
  if (name == "uncond") return Task::uncond;
  if (name == "cond") return Task::cond;
  throw ParseError("unknown task '" + std::string(name) + "' (expected uncond or cond)");
}

SerializedInput serialize_uncond_input(const Utterance& candidate, const Utterance& response) {
  SerializedInput out;
  append_segment(out, candidate.text, "candidate");
  out.text.append(kDelimiter);
  append_segment(out, response.text, "response");
  return out;
}

SerializedInput serialize_cond_input(const Utterance& candidate, const Utterance& conditioning,
                                     const Utterance& response) {
  if (candidate.index == conditioning.index) {
    throw PreconditionError("conditional input needs distinct candidate and conditioning utterances (both index " +
                            std::to_string(candidate.index) + ")");
  }
  SerializedInput out;
  append_segment(out, candidate.text, "candidate");
  out.text.append(kDelimiter);
  append_segment(out, conditioning.text, "conditioning");
  out.text.append(kDelimiter);
  append_segment(out, response.text, "response");
  return out;
}

UtteranceRef ref_of(const std::string& dialogue_id, const Utterance& u) { return {dialogue_id, u.index, u.text}; }

std::optional<std::size_t> Query::offset() const {
  if (candidate.dialogue_id != response.dialogue_id || candidate.index >= response.index) return std::nullopt;
  return response.index - candidate.index;
}

std::string Query::serialize() const {
  std::string s = candidate.text;
  s.append(kDelimiter);
  if (task == Task::cond) {
    if (conditioning) s.append(conditioning->text);
    s.append(kDelimiter);
  }
  s.append(response.text);
  return s;
}

Query uncond_query(const HistoryResponsePair& pair, std::size_t candidate) {
  return {Task::uncond, ref_of(pair.dialogue_id, pair.history.at(candidate)), std::nullopt,
          ref_of(pair.dialogue_id, pair.response)};
}

Query cond_query(const HistoryResponsePair& pair, std::size_t candidate, std::size_t conditioning) {
  if (candidate == conditioning) {
    throw PreconditionError("conditional query needs distinct candidate and conditioning indices");
  }
  return {Task::cond, ref_of(pair.dialogue_id, pair.history.at(candidate)),
          ref_of(pair.dialogue_id, pair.history.at(conditioning)), ref_of(pair.dialogue_id, pair.response)};
}

ValMetrics binary_metrics(std::span<const double> probs, std::span<const int> labels) {
  if (probs.size() != labels.size()) throw PreconditionError("binary_metrics: size mismatch");
  std::size_t tp = 0, fp = 0, fn = 0, correct = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const bool predicted = probs[i] > 0.5;
    const bool actual = labels[i] == 1;
    correct += predicted == actual;
    tp += predicted && actual;
    fp += predicted && !actual;
    fn += !predicted && actual;
  }
  ValMetrics m;
  if (!probs.empty()) m.accuracy = static_cast<double>(correct) / static_cast<double>(probs.size());
  const auto denom = 2 * tp + fp + fn;
  m.f1 = denom == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
  return m;
}

std::vector<double> DependenceBackend::predict_batch(std::span<const Query> queries) const {
  std::vector<double> out;
  out.reserve(queries.size());
  for (const auto& q : queries) out.push_back(predict(q));
  return out;
}

double checked_probability(double p, std::string_view context) {
  if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
    throw ProtocolError(std::string(context) + ": probability " + text::format_double(p) + " outside [0,1]");
  }
  return p;
}

}  // namespace causalscore
