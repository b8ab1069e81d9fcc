#include "causalscore/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "causalscore/error.hpp"
#include "causalscore/parallel.hpp"
#include "causalscore/text.hpp"

namespace causalscore {
namespace {

bool in_unit_interval(double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; }

double mean(std::span<const double> xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

double parse_double(const std::string& s, const std::string& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError(where + ": not a number: '" + s + "'");
  }
}

std::size_t parse_size(const std::string& s, const std::string& where) {
  const double v = parse_double(s, where);
  if (v < 0 || v != std::floor(v)) throw ParseError(where + ": not a non-negative integer: '" + s + "'");
  return static_cast<std::size_t>(v);
}

}  // namespace

void DependenceProbe::validate() const {
  for (double p : uncond) {
    if (!in_unit_interval(p)) throw InvariantError("probe: unconditional probability outside [0,1]");
  }
  for (const auto& [key, p] : cond) {
    if (!in_unit_interval(p)) throw InvariantError("probe: conditional probability outside [0,1]");
    const auto in_dep = [&](std::size_t i) { return std::binary_search(dep_set.begin(), dep_set.end(), i); };
    if (key.first == key.second || !in_dep(key.first) || !in_dep(key.second)) {
      throw InvariantError("probe: conditional key outside dep_set x dep_set minus diagonal");
    }
  }
}

DependenceProbe make_probe(std::vector<double> uncond, std::map<std::pair<std::size_t, std::size_t>, double> cond,
                           double threshold) {
  DependenceProbe p;
  p.uncond = std::move(uncond);
  for (std::size_t i = 0; i < p.uncond.size(); ++i) {
    if (p.uncond[i] > threshold) p.dep_set.push_back(i);
  }
  p.cond = std::move(cond);
  p.validate();
  return p;
}

DependenceProbe probe(const HistoryResponsePair& pair, const DependenceBackend& backend, double threshold) {
  if (pair.history.empty()) {
    throw PreconditionError("probe: dialogue " + pair.dialogue_id + " response " +
                            std::to_string(pair.response_index) + " has an empty history");
  }
  const std::string where = "dialogue " + pair.dialogue_id + " response " + std::to_string(pair.response_index);
  try {
    std::vector<Query> queries;
    for (std::size_t i = 0; i < pair.history.size(); ++i) queries.push_back(uncond_query(pair, i));
    auto uncond = backend.predict_batch(queries);
    for (double p : uncond) checked_probability(p, where);

    DependenceProbe result;
    result.uncond = std::move(uncond);
    for (std::size_t i = 0; i < result.uncond.size(); ++i) {
      if (result.uncond[i] > threshold) result.dep_set.push_back(i);
    }
    queries.clear();
    std::vector<std::pair<std::size_t, std::size_t>> keys;
    for (auto i : result.dep_set) {
      for (auto j : result.dep_set) {
        if (i == j) continue;
        queries.push_back(cond_query(pair, i, j));
        keys.emplace_back(i, j);
      }
    }
    const auto cond = backend.predict_batch(queries);
    for (std::size_t k = 0; k < keys.size(); ++k) result.cond[keys[k]] = checked_probability(cond.at(k), where);
    return result;
  } catch (const Error& e) {
    throw BackendError(e.kind(), where + ": " + e.what());
  }
}

std::string_view to_string(ScoreMode mode) {
  switch (mode) {
    case ScoreMode::full: return "full";
    case ScoreMode::uncond_only: return "uncond_only";
    case ScoreMode::cond_only: return "cond_only";
    case ScoreMode::max_ci: return "max_ci";
  }
  return "unknown";
}

ScoreMode parse_score_mode(std::string_view name) {
  for (auto m : kAllModes) {
    if (to_string(m) == name) return m;
  }
  throw ParseError("unknown score mode '" + std::string(name) + "'");
}

Aggregate aggregate(const DependenceProbe& probe, ScoreMode mode) {
  Aggregate a;
  a.dep_size = probe.dep_set.size();
  if (a.dep_size < 2) {
    a.degenerate = true;
    if (a.dep_size == 0) {
      a.uncond_avg = probe.uncond.empty() ? 0.0 : mean(probe.uncond);
    } else {
      a.uncond_avg = probe.uncond.at(probe.dep_set.front());
    }
    a.cond_avg = a.uncond_avg;
    a.score = a.uncond_avg;
    return a;
  }

  std::vector<double> dep_uncond;
  for (auto i : probe.dep_set) dep_uncond.push_back(probe.uncond.at(i));
  a.uncond_avg = mean(dep_uncond);

  std::vector<double> cond;
  for (auto i : probe.dep_set) {
    for (auto j : probe.dep_set) {
      if (i != j) cond.push_back(probe.cond.at({i, j}));
    }
  }
  a.cond_avg = mode == ScoreMode::max_ci ? *std::max_element(cond.begin(), cond.end()) : mean(cond);

  switch (mode) {
    case ScoreMode::full:
    case ScoreMode::max_ci: a.score = 0.5 * (a.uncond_avg + a.cond_avg); break;
    case ScoreMode::uncond_only: a.score = a.uncond_avg; break;
    case ScoreMode::cond_only: a.score = a.cond_avg; break;
  }
  return a;
}

ScoreReport score_corpus(const Corpus& corpus, const DependenceBackend& backend, std::span<const ScoreMode> modes,
                         const ScoreOptions& options) {
  struct Outcome {
    std::vector<ScoreRow> rows;
    std::optional<ScoreError> error;
  };
  const auto& pairs = corpus.pairs();
  auto outcomes = parallel_map(pairs.size(), options.jobs, [&](std::size_t k) {
    const auto& pair = pairs[k];
    Outcome o;
    try {
      const auto p = probe(pair, backend, options.threshold);
      for (auto mode : modes) o.rows.push_back({pair.dialogue_id, pair.response_index, mode, aggregate(p, mode)});
    } catch (const Error& e) {
      o.error = ScoreError{pair.dialogue_id, pair.response_index, e.what()};
    }
    return o;
  });
  ScoreReport report;
  for (auto& o : outcomes) {
    std::move(o.rows.begin(), o.rows.end(), std::back_inserter(report.rows));
    if (o.error) report.errors.push_back(std::move(*o.error));
  }
  return report;
}

void write_score_csv(std::ostream& out, const ScoreReport& report) {
  out << kScoreCsvHeader << '\n';
  for (const auto& r : report.rows) {
    out << csv_field(r.dialogue_id) << ',' << r.response_index << ',' << to_string(r.mode) << ','
        << text::format_double(r.value.score) << ',' << r.value.dep_size << ','
        << text::format_double(r.value.uncond_avg) << ',' << text::format_double(r.value.cond_avg) << ','
        << (r.value.degenerate ? "true" : "false") << '\n';
  }
}

void write_score_jsonl(std::ostream& out, const ScoreReport& report) {
  for (const auto& r : report.rows) {
    nlohmann::json j = {{"dialogue_id", r.dialogue_id},   {"response_index", r.response_index},
                        {"mode", to_string(r.mode)},      {"score", r.value.score},
                        {"dep_size", r.value.dep_size},   {"uncond_avg", r.value.uncond_avg},
                        {"cond_avg", r.value.cond_avg},   {"degenerate", r.value.degenerate}};
    out << j.dump() << '\n';
  }
}

std::vector<ScoreRow> parse_score_rows(std::istream& in, std::string_view source) {
  std::vector<ScoreRow> rows;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto trimmed = text::trim(line);
    if (trimmed.empty()) continue;
    const std::string where = std::string(source) + ":" + std::to_string(line_no);
    ScoreRow row;
    if (trimmed.front() == '{') {
      try {
        const auto j = nlohmann::json::parse(trimmed);
        row.dialogue_id = j.at("dialogue_id").get<std::string>();
        row.response_index = j.at("response_index").get<std::size_t>();
        row.mode = parse_score_mode(j.at("mode").get<std::string>());
        row.value.score = j.at("score").get<double>();
        row.value.dep_size = j.value("dep_size", std::size_t{0});
        row.value.uncond_avg = j.value("uncond_avg", 0.0);
        row.value.cond_avg = j.value("cond_avg", 0.0);
        row.value.degenerate = j.value("degenerate", false);
      } catch (const nlohmann::json::exception& e) {
        throw ParseError(where + ": " + e.what());
      }
    } else {
      if (!header_seen) {
        header_seen = true;
        if (trimmed != kScoreCsvHeader) throw ParseError(where + ": unexpected score CSV header");
        continue;
      }
      const auto f = split_csv_line(std::string(trimmed));
      if (f.size() != 8) throw ParseError(where + ": expected 8 fields, found " + std::to_string(f.size()));
      row.dialogue_id = f[0];
      row.response_index = parse_size(f[1], where);
      row.mode = parse_score_mode(f[2]);
      row.value.score = parse_double(f[3], where);
      row.value.dep_size = parse_size(f[4], where);
      row.value.uncond_avg = parse_double(f[5], where);
      row.value.cond_avg = parse_double(f[6], where);
      if (f[7] != "true" && f[7] != "false") throw ParseError(where + ": degenerate must be true or false");
      row.value.degenerate = f[7] == "true";
    }
    if (!in_unit_interval(row.value.score)) throw InvariantError(where + ": score outside [0,1]");
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<ScoreRow> load_score_rows(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open score file " + path.string());
  return parse_score_rows(in, path.string());
}

std::vector<std::size_t> score_histogram(std::span<const double> scores, std::size_t bins) {
  if (bins == 0) throw PreconditionError("histogram needs at least one bin");
  std::vector<std::size_t> counts(bins, 0);
  for (double s : scores) {
    if (!in_unit_interval(s)) throw InvariantError("histogram: score outside [0,1]");
    auto k = static_cast<std::size_t>(s * static_cast<double>(bins));
    counts[std::min(k, bins - 1)]++;
  }
  return counts;
}

void write_histogram_csv(std::ostream& out, std::span<const std::size_t> counts) {
  out << "bin_start,bin_end,count\n";
  const double n = static_cast<double>(counts.size());
  for (std::size_t k = 0; k < counts.size(); ++k) {
    out << text::format_double(static_cast<double>(k) / n) << ',' << text::format_double(static_cast<double>(k + 1) / n)
        << ',' << counts[k] << '\n';
  }
}

}  // namespace causalscore
