#include "causalscore/stats.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include <boost/math/distributions/students_t.hpp>
#include <json.hpp>

#include "causalscore/error.hpp"
#include "causalscore/log.hpp"
#include "causalscore/text.hpp"

namespace causalscore {
namespace {

std::optional<double> t_test_p(double r, std::size_t n) {
  const double df = static_cast<double>(n) - 2.0;
  if (df < 1.0) return std::nullopt;
  if (std::abs(r) >= 1.0) return 0.0;
  const double t = r * std::sqrt(df / (1.0 - r * r));
  boost::math::students_t dist(df);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

std::pair<double, double> score_pair(const MetricScores& scores, const PairwiseJudgement& j, bool& found) {
  const auto a = scores.find({j.history_id, j.source_a});
  const auto b = scores.find({j.history_id, j.source_b});
  found = a != scores.end() && b != scores.end();
  return found ? std::pair{a->second, b->second} : std::pair{0.0, 0.0};
}

}  // namespace

std::string_view to_string(Dimension d) {
  switch (d) {
    case Dimension::empathy: return "empathy";
    case Dimension::specificity: return "specificity";
    case Dimension::relevance: return "relevance";
    case Dimension::consistency: return "consistency";
    case Dimension::overall: return "overall";
  }
  return "unknown";
}

Dimension parse_dimension(std::string_view name) {
  for (auto d : kAllDimensions) {
    if (to_string(d) == name) return d;
  }
  throw ParseError("unknown dimension '" + std::string(name) + "'");
}

std::string_view to_string(Choice c) {
  switch (c) {
    case Choice::a_better: return "A_better";
    case Choice::b_better: return "B_better";
    case Choice::both_good: return "both_good";
    case Choice::both_bad: return "both_bad";
  }
  return "unknown";
}

Choice parse_choice(std::string_view name) {
  for (auto c : {Choice::a_better, Choice::b_better, Choice::both_good, Choice::both_bad}) {
    if (to_string(c) == name) return c;
  }
  throw ParseError("unknown choice '" + std::string(name) + "'");
}

std::vector<PairwiseJudgement> parse_judgements(std::istream& in, std::string_view source) {
  std::vector<PairwiseJudgement> out;
  std::set<std::tuple<std::string, Dimension, std::string>> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    const std::string where = std::string(source) + ":" + std::to_string(line_no);
    PairwiseJudgement j;
    try {
      const auto obj = nlohmann::json::parse(line);
      j.comparison_id = obj.at("comparison_id").get<std::string>();
      j.history_id = obj.at("history_id").get<std::string>();
      j.source_a = obj.at("source_a").get<std::string>();
      j.source_b = obj.at("source_b").get<std::string>();
      j.dimension = parse_dimension(obj.at("dimension").get<std::string>());
      j.annotator_id = obj.at("annotator_id").get<std::string>();
      j.choice = parse_choice(obj.at("choice").get<std::string>());
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(where + ": " + e.what());
    } catch (const ParseError& e) {
      throw ParseError(where + ": " + e.what());
    }
    if (j.source_a == j.source_b) throw InvariantError(where + ": source_a equals source_b");
    if (!seen.emplace(j.comparison_id, j.dimension, j.annotator_id).second) {
      throw InvariantError(where + ": duplicate judgement for comparison " + j.comparison_id + ", dimension " +
                           std::string(to_string(j.dimension)) + ", annotator " + j.annotator_id);
    }
    out.push_back(std::move(j));
  }
  return out;
}

std::vector<PairwiseJudgement> load_judgements(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open judgement file " + path.string());
  return parse_judgements(in, path.string());
}

MetricScores metric_scores_from_rows(std::span<const ScoreRow> rows, ScoreMode mode) {
  MetricScores out;
  for (const auto& r : rows) {
    if (r.mode != mode) continue;
    const auto at = r.dialogue_id.rfind('@');
    if (at == std::string::npos || at == 0 || at + 1 == r.dialogue_id.size()) {
      throw ParseError("score row dialogue_id '" + r.dialogue_id + "' is not of the form <history_id>@<source>");
    }
    const auto key = std::pair{r.dialogue_id.substr(0, at), r.dialogue_id.substr(at + 1)};
    if (!out.emplace(key, r.value.score).second) {
      throw InvariantError("more than one score for history " + key.first + ", source " + key.second);
    }
  }
  return out;
}

MetricScores load_metric_scores(const std::filesystem::path& path, ScoreMode mode) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open score file " + path.string());
  std::string first;
  while (std::getline(in, first) && text::trim(first).empty()) {
  }
  if (text::trim(first) == "history_id,source,score") {
    MetricScores out;
    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
      ++line_no;
      if (text::trim(line).empty()) continue;
      std::stringstream ss{std::string(text::trim(line))};
      std::string h, s, v;
      std::getline(ss, h, ',');
      std::getline(ss, s, ',');
      std::getline(ss, v);
      try {
        out[{h, s}] = std::stod(v);
      } catch (const std::exception&) {
        throw ParseError(path.string() + ":" + std::to_string(line_no) + ": bad score '" + v + "'");
      }
    }
    return out;
  }
  in.clear();
  in.seekg(0);
  const auto rows = parse_score_rows(in, path.string());
  return metric_scores_from_rows(rows, mode);
}

std::map<PointKey, int> voting_points(std::span<const PairwiseJudgement> judgements) {
  std::map<PointKey, int> points;
  for (const auto& j : judgements) {
    int a = 0, b = 0;
    switch (j.choice) {
      case Choice::a_better: a = 1; break;
      case Choice::b_better: b = 1; break;
      case Choice::both_good: a = b = 1; break;
      case Choice::both_bad: break;
    }
    points[{j.history_id, j.source_a, j.dimension}] += a;
    points[{j.history_id, j.source_b, j.dimension}] += b;
  }
  return points;
}

Correlation pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw PreconditionError("pearson: inputs differ in length");
  if (x.size() < 3) throw PreconditionError("pearson: needs at least 3 observations");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) throw UndefinedStatistic("correlation undefined for a constant input");
  Correlation c;
  c.value = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  c.n = x.size();
  c.p_value = t_test_p(c.value, c.n);
  return c;
}

std::vector<double> average_ranks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

Correlation spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw PreconditionError("spearman: inputs differ in length");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return pearson(rx, ry);
}

Correlation point_biserial(std::span<const int> binary, std::span<const double> values) {
  if (binary.size() != values.size()) throw PreconditionError("point_biserial: inputs differ in length");
  bool zero = false, one = false;
  std::vector<double> b;
  b.reserve(binary.size());
  for (int v : binary) {
    if (v != 0 && v != 1) throw PreconditionError("point_biserial: binary variable must be 0 or 1");
    zero |= v == 0;
    one |= v == 1;
    b.push_back(static_cast<double>(v));
  }
  if (!zero || !one) throw UndefinedStatistic("point_biserial: binary variable has a single class");
  return pearson(b, values);
}

IgnoreEqualData ignore_equal_pairs(std::span<const PairwiseJudgement> judgements, const MetricScores& scores) {
  IgnoreEqualData out;
  for (const auto& j : judgements) {
    if (j.choice != Choice::a_better && j.choice != Choice::b_better) continue;
    bool found = false;
    const auto [a, b] = score_pair(scores, j, found);
    if (!found) {
      log::warn("ignore_equal: no score for comparison " + j.comparison_id + " (history " + j.history_id + ")");
      ++out.skipped;
      continue;
    }
    out.human.push_back(j.choice == Choice::a_better ? 1 : 0);
    out.delta.push_back(a - b);
  }
  return out;
}

Cont2CatChoice cont2cat(double score_a, double score_b) {
  if (score_a > score_b) return {Choice::a_better, false};
  return {Choice::b_better, score_a == score_b};
}

double krippendorff_alpha_nominal(const std::map<std::string, std::vector<std::string>>& units) {
  // coincidences[c][k] = sum over units of (#c-k value pairs) / (m_u - 1)
  std::map<std::string, std::map<std::string, double>> coincidences;
  std::size_t pairable = 0;
  for (const auto& [unit, values] : units) {
    const auto m = values.size();
    if (m < 2) continue;
    ++pairable;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        if (i != j) coincidences[values[i]][values[j]] += 1.0 / static_cast<double>(m - 1);
      }
    }
  }
  if (pairable == 0) throw PreconditionError("krippendorff_alpha: no unit has two or more values");

  std::map<std::string, double> marginals;
  double n = 0.0;
  double observed = 0.0;
  for (const auto& [c, row] : coincidences) {
    for (const auto& [k, o] : row) {
      marginals[c] += o;
      n += o;
      if (c != k) observed += o;
    }
  }
  if (observed == 0.0) return 1.0;
  double expected = 0.0;
  for (const auto& [c, nc] : marginals) {
    for (const auto& [k, nk] : marginals) {
      if (c != k) expected += nc * nk;
    }
  }
  return 1.0 - (n - 1.0) * observed / expected;
}

double cohen_kappa(std::span<const std::string> first, std::span<const std::string> second) {
  if (first.size() != second.size()) throw PreconditionError("cohen_kappa: label lists differ in length");
  if (first.empty()) throw PreconditionError("cohen_kappa: no labels");
  const double n = static_cast<double>(first.size());
  std::map<std::string, double> m1, m2;
  double agree = 0.0;
  for (std::size_t i = 0; i < first.size(); ++i) {
    m1[first[i]] += 1.0;
    m2[second[i]] += 1.0;
    agree += first[i] == second[i] ? 1.0 : 0.0;
  }
  const double p_o = agree / n;
  double p_e = 0.0;
  for (const auto& [label, c1] : m1) {
    if (auto it = m2.find(label); it != m2.end()) p_e += (c1 / n) * (it->second / n);
  }
  if (p_e >= 1.0) {
    if (p_o >= 1.0) return 1.0;
    throw UndefinedStatistic("cohen_kappa: chance agreement is 1");
  }
  return (p_o - p_e) / (1.0 - p_e);
}

std::set<std::size_t> tokens_in_spans(std::string_view text, std::span<const Span> spans) {
  std::set<std::size_t> out;
  const auto ranges = text::whitespace_token_ranges(text);
  for (std::size_t t = 0; t < ranges.size(); ++t) {
    for (const auto& s : spans) {
      if (ranges[t].first < s.end && s.start < ranges[t].second) {
        out.insert(t);
        break;
      }
    }
  }
  return out;
}

double clause_f1(const AnnotatorTokens& a, const AnnotatorTokens& b) {
  std::size_t shared = 0, total_a = 0, total_b = 0;
  for (const auto& [unit, tokens] : a) {
    total_a += tokens.size();
    if (auto it = b.find(unit); it != b.end()) {
      for (auto t : tokens) shared += it->second.count(t);
    }
  }
  for (const auto& [unit, tokens] : b) total_b += tokens.size();
  if (total_a == 0 && total_b == 0) return 1.0;
  if (total_a == 0 || total_b == 0 || shared == 0) return 0.0;

  auto f1 = [&](std::size_t reference, std::size_t predicted) {
    const double p = static_cast<double>(shared) / static_cast<double>(predicted);
    const double r = static_cast<double>(shared) / static_cast<double>(reference);
    return 2.0 * p * r / (p + r);
  };
  return 0.5 * (f1(total_a, total_b) + f1(total_b, total_a));
}

double pairwise_clause_f1(std::span<const AnnotatorTokens> annotators) {
  if (annotators.size() < 2) throw PreconditionError("pairwise_clause_f1: needs at least two annotators");
  double total = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < annotators.size(); ++i) {
    for (std::size_t j = i + 1; j < annotators.size(); ++j) {
      total += clause_f1(annotators[i], annotators[j]);
      ++pairs;
    }
  }
  return total / static_cast<double>(pairs);
}

std::string_view to_string(Schema s) {
  switch (s) {
    case Schema::voting: return "voting";
    case Schema::ignore_equal: return "ignore_equal";
    case Schema::cont2cat: return "cont2cat";
  }
  return "unknown";
}

Schema parse_schema(std::string_view name) {
  for (auto s : {Schema::voting, Schema::ignore_equal, Schema::cont2cat}) {
    if (to_string(s) == name) return s;
  }
  throw ParseError("unknown schema '" + std::string(name) + "'");
}

std::vector<CorrelationReport> correlate(Schema schema, std::span<const PairwiseJudgement> judgements,
                                         const MetricScores& scores, Dimension dimension) {
  std::vector<PairwiseJudgement> selected;
  for (const auto& j : judgements) {
    if (j.dimension == dimension) selected.push_back(j);
  }
  if (selected.empty()) {
    throw PreconditionError("correlate: no judgements for dimension " + std::string(to_string(dimension)));
  }

  std::vector<CorrelationReport> out;
  auto report = [&](std::string statistic, const Correlation& c, std::size_t skipped) {
    CorrelationReport r;
    r.schema = schema;
    r.dimension = dimension;
    r.statistic = std::move(statistic);
    r.value = c.value;
    r.p_value = c.p_value;
    r.n = c.n;
    r.skipped = skipped;
    out.push_back(std::move(r));
  };

  switch (schema) {
    case Schema::voting: {
      std::vector<double> human, metric;
      std::size_t skipped = 0;
      for (const auto& [key, points] : voting_points(selected)) {
        const auto it = scores.find({std::get<0>(key), std::get<1>(key)});
        if (it == scores.end()) {
          log::warn("voting: no score for history " + std::get<0>(key) + ", source " + std::get<1>(key));
          ++skipped;
          continue;
        }
        human.push_back(static_cast<double>(points));
        metric.push_back(it->second);
      }
      report("pearson", pearson(human, metric), skipped);
      report("spearman", spearman(human, metric), skipped);
      break;
    }
    case Schema::ignore_equal: {
      const auto data = ignore_equal_pairs(selected, scores);
      report("point_biserial", point_biserial(data.human, data.delta), data.skipped);
      break;
    }
    case Schema::cont2cat: {
      std::map<std::string, std::vector<std::string>> units;
      std::map<std::string, const PairwiseJudgement*> first_of;
      for (const auto& j : selected) {
        units[j.comparison_id].emplace_back(to_string(j.choice));
        first_of.try_emplace(j.comparison_id, &j);
      }
      std::size_t ties = 0, skipped = 0;
      for (const auto& [cid, j] : first_of) {
        bool found = false;
        const auto [a, b] = score_pair(scores, *j, found);
        if (!found) {
          log::warn("cont2cat: no score for comparison " + cid);
          ++skipped;
          continue;
        }
        const auto synthetic = cont2cat(a, b);
        ties += synthetic.tie;
        units[cid].emplace_back(to_string(synthetic.choice));
      }
      Correlation c;
      c.value = krippendorff_alpha_nominal(units);
      c.n = units.size();
      report("krippendorff_alpha", c, skipped);
      out.back().ties = ties;
      break;
    }
  }
  return out;
}

void write_correlation_csv(std::ostream& out, std::span<const CorrelationReport> reports) {
  out << kCorrelationCsvHeader << '\n';
  for (const auto& r : reports) {
    out << to_string(r.schema) << ',' << to_string(r.dimension) << ',' << r.statistic << ','
        << text::format_double(r.value) << ',' << (r.p_value ? text::format_double(*r.p_value) : "") << ','
        << r.n << ',' << r.ties << ',' << r.skipped << '\n';
  }
}

std::string correlation_json(std::span<const CorrelationReport> reports) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : reports) {
    arr.push_back({{"schema", to_string(r.schema)},
                   {"dimension", to_string(r.dimension)},
                   {"statistic", r.statistic},
                   {"value", r.value},
                   {"p_value", r.p_value ? nlohmann::json(*r.p_value) : nlohmann::json(nullptr)},
                   {"n", r.n},
                   {"ties", r.ties},
                   {"skipped", r.skipped}});
  }
  return arr.dump(2);
}

}  // namespace causalscore
