#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "causalscore/corpus.hpp"
#include "causalscore/scoring.hpp"

namespace causalscore {

enum class Dimension { empathy, specificity, relevance, consistency, overall };
enum class Choice { a_better, b_better, both_good, both_bad };

inline constexpr Dimension kAllDimensions[] = {Dimension::empathy, Dimension::specificity, Dimension::relevance,
                                               Dimension::consistency, Dimension::overall};

std::string_view to_string(Dimension d);
Dimension parse_dimension(std::string_view name);
// Wire names: "A_better", "B_better", "both_good", "both_bad".
std::string_view to_string(Choice c);
Choice parse_choice(std::string_view name);

struct PairwiseJudgement {
  std::string comparison_id;
  std::string history_id;
  std::string source_a;
  std::string source_b;
  Dimension dimension = Dimension::overall;
  std::string annotator_id;
  Choice choice = Choice::both_bad;
};

// JSON Lines, one judgement per line. Throws InvariantError when
// source_a == source_b or a (comparison_id, dimension, annotator_id) repeats.
std::vector<PairwiseJudgement> parse_judgements(std::istream& in, std::string_view source = "<stream>");
std::vector<PairwiseJudgement> load_judgements(const std::filesystem::path& path);

// (history_id, source) -> automatic metric score.
using MetricScores = std::map<std::pair<std::string, std::string>, double>;

// Score rows of one mode whose dialogue_id has the form "<history_id>@<source>"
// (split at the last '@').
MetricScores metric_scores_from_rows(std::span<const ScoreRow> rows, ScoreMode mode);
// Either a score report (CSV or JSON Lines) or a CSV with header
// "history_id,source,score".
MetricScores load_metric_scores(const std::filesystem::path& path, ScoreMode mode);

using PointKey = std::tuple<std::string, std::string, Dimension>;  // history_id, source, dimension

// Voting schema: per judgement A_better gives (1,0), B_better (0,1),
// both_good (1,1), both_bad (0,0); points sum over annotators and comparisons.
std::map<PointKey, int> voting_points(std::span<const PairwiseJudgement> judgements);

struct Correlation {
  double value = 0.0;
  std::optional<double> p_value;
  std::size_t n = 0;
};

// Product-moment correlation; two-sided p from Student's t with n-2 degrees
// of freedom. Throws PreconditionError for mismatched sizes or n < 3 and
// UndefinedStatistic when either input is constant.
Correlation pearson(std::span<const double> x, std::span<const double> y);
// Pearson over average ranks (ties share the mean rank).
Correlation spearman(std::span<const double> x, std::span<const double> y);
// Pearson between a 0/1 variable and a continuous one. Throws
// UndefinedStatistic unless both classes occur.
Correlation point_biserial(std::span<const int> binary, std::span<const double> values);

// 1-based average ranks.
std::vector<double> average_ranks(std::span<const double> x);

struct IgnoreEqualData {
  std::vector<int> human;     // 1 for A_better, 0 for B_better
  std::vector<double> delta;  // score(A) - score(B)
  std::size_t skipped = 0;    // retained judgements lacking a score
};

// Keeps only A_better / B_better judgements (all dimensions given).
IgnoreEqualData ignore_equal_pairs(std::span<const PairwiseJudgement> judgements, const MetricScores& scores);

struct Cont2CatChoice {
  Choice choice = Choice::b_better;
  bool tie = false;
};

// score_a > score_b gives A_better; anything else, ties included, B_better.
Cont2CatChoice cont2cat(double score_a, double score_b);

// Nominal Krippendorff's alpha from the coincidence matrix. Units with fewer
// than two values are ignored; throws PreconditionError when none remain.
// Returns 1 when there is no observed disagreement.
double krippendorff_alpha_nominal(const std::map<std::string, std::vector<std::string>>& units);

// (p_o - p_e) / (1 - p_e). Throws PreconditionError on empty or mismatched
// input and UndefinedStatistic when p_e = 1 but p_o < 1.
double cohen_kappa(std::span<const std::string> first, std::span<const std::string> second);

// Annotated token indices per unit for one annotator.
using AnnotatorTokens = std::map<std::string, std::set<std::size_t>>;

// Indices of whitespace tokens of `text` that overlap any span.
std::set<std::size_t> tokens_in_spans(std::string_view text, std::span<const Span> spans);

// Token-level F1 between two annotators, pooled over the union of their
// units, averaged over both reference directions. Two empty annotations agree
// perfectly.
double clause_f1(const AnnotatorTokens& a, const AnnotatorTokens& b);

// Mean clause_f1 over all unordered annotator pairs. Needs >= 2 annotators.
double pairwise_clause_f1(std::span<const AnnotatorTokens> annotators);

enum class Schema { voting, ignore_equal, cont2cat };
std::string_view to_string(Schema s);
Schema parse_schema(std::string_view name);

struct CorrelationReport {
  Schema schema = Schema::voting;
  Dimension dimension = Dimension::overall;
  std::string statistic;  // pearson | spearman | point_biserial | krippendorff_alpha
  double value = 0.0;
  std::optional<double> p_value;
  std::size_t n = 0;
  std::size_t ties = 0;     // cont2cat: score equalities mapped to B_better
  std::size_t skipped = 0;  // records that could not be joined to a score
};

// voting -> pearson + spearman of (points, score); ignore_equal ->
// point_biserial of (human, delta); cont2cat -> alpha over the human
// annotators plus the metric as one more annotator. Throws PreconditionError
// when no judgement matches the dimension.
std::vector<CorrelationReport> correlate(Schema schema, std::span<const PairwiseJudgement> judgements,
                                         const MetricScores& scores, Dimension dimension);

inline constexpr std::string_view kCorrelationCsvHeader = "schema,dimension,statistic,value,p_value,n,ties,skipped";
void write_correlation_csv(std::ostream& out, std::span<const CorrelationReport> reports);
std::string correlation_json(std::span<const CorrelationReport> reports);

}  // namespace causalscore
