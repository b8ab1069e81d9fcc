#include "causalscore/cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "causalscore/classifier.hpp"
#include "causalscore/corpus.hpp"
#include "causalscore/datasets.hpp"
#include "causalscore/error.hpp"
#include "causalscore/fixture.hpp"
#include "causalscore/lexical.hpp"
#include "causalscore/log.hpp"
#include "causalscore/remote.hpp"
#include "causalscore/scoring.hpp"
#include "causalscore/selftrain.hpp"
#include "causalscore/stats.hpp"
#include "causalscore/text.hpp"

namespace causalscore::cli {
namespace {

namespace fs = std::filesystem;

struct BackendOptions {
  std::string backend = "lexical";
  std::string fixtures;
  std::string uncond_model;
  std::string cond_model;
  std::string endpoint;
  std::size_t batch_size = 32;
  std::size_t retries = 3;
  double timeout_seconds = 30.0;

  RemoteConfig remote() const {
    RemoteConfig c;
    c.endpoint = endpoint;
    if (c.endpoint.empty()) {
      if (auto env = endpoint_from_env()) c.endpoint = *env;
    }
    if (c.endpoint.empty()) throw PreconditionError("remote backend needs --endpoint or CAUSALSCORE_ENDPOINT");
    c.batch_size = batch_size;
    c.retries = retries;
    c.timeout = std::chrono::milliseconds(static_cast<long long>(timeout_seconds * 1000.0));
    return c;
  }

  std::shared_ptr<const DependenceBackend> make() const {
    if (backend == "fixture") {
      if (fixtures.empty()) throw PreconditionError("fixture backend needs --fixtures");
      return std::make_shared<const FixtureBackend>(FixtureBackend::load(fixtures));
    }
    if (backend == "remote") return std::make_shared<const RemoteBackend>(remote());
    if (uncond_model.empty()) throw PreconditionError("lexical backend needs --uncond-model");
    auto uncond = std::make_shared<const LexicalModel>(LexicalModel::load(uncond_model));
    if (cond_model.empty()) return uncond;
    auto cond = std::make_shared<const LexicalModel>(LexicalModel::load(cond_model));
    return std::make_shared<const TaskRouter>(uncond, cond);
  }
};

void add_backend_options(CLI::App* cmd, BackendOptions& o) {
  cmd->add_option("--backend", o.backend, "Classifier backend")
      ->check(CLI::IsMember({"lexical", "fixture", "remote"}))
      ->capture_default_str();
  cmd->add_option("--fixtures", o.fixtures, "Fixture probabilities (JSON Lines) for --backend fixture");
  cmd->add_option("--uncond-model", o.uncond_model, "Lexical unconditional model (JSON)");
  cmd->add_option("--cond-model", o.cond_model, "Lexical conditional model (JSON)");
  cmd->add_option("--endpoint", o.endpoint, "Model server URL; defaults to $CAUSALSCORE_ENDPOINT");
  cmd->add_option("--batch-size", o.batch_size, "Remote batch size")->capture_default_str();
  cmd->add_option("--retries", o.retries, "Remote retries on transport failure")->capture_default_str();
  cmd->add_option("--timeout", o.timeout_seconds, "Remote timeout in seconds")->capture_default_str();
}

CLI::Validator open_unit_interval() {
  return CLI::Validator(
      [](std::string& s) -> std::string {
        try {
          const double v = std::stod(s);
          if (v > 0.0 && v < 1.0) return {};
        } catch (const std::exception&) {
        }
        return "value must lie strictly between 0 and 1";
      },
      "(0,1)");
}

// Writes to a file, or to `fallback` when the path is empty or "-".
class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) {
    if (path.empty() || path == "-") {
      stream_ = &fallback;
    } else {
      file_.open(path, std::ios::binary);
      if (!file_) throw PreconditionError("cannot write " + path);
      stream_ = &file_;
    }
  }
  std::ostream& stream() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw PreconditionError("cannot write " + path.string());
  f << content;
}

bool wants_jsonl(const std::string& format, const std::string& path) {
  if (!format.empty()) return format == "jsonl" || format == "json";
  return path.size() >= 6 && path.ends_with(".jsonl");
}

std::string error_json(const std::string& kind, const std::string& message) {
  return nlohmann::json{{"error", message}, {"kind", kind}}.dump();
}

// --- score ---------------------------------------------------------------

struct ScoreArgs {
  std::string corpus;
  BackendOptions backend;
  std::vector<std::string> modes{"full"};
  std::string out;
  std::string format;
  std::size_t jobs = 1;
  double threshold = kDependenceThreshold;
};

int cmd_score(const ScoreArgs& a, std::ostream& out, std::ostream& err) {
  const auto corpus = load_corpus(a.corpus);
  const auto backend = a.backend.make();
  std::vector<ScoreMode> modes;
  for (const auto& m : a.modes) {
    if (m == "all") {
      modes.assign(std::begin(kAllModes), std::end(kAllModes));
      break;
    }
    modes.push_back(parse_score_mode(m));
  }
  const auto report = score_corpus(corpus, *backend, modes, {a.threshold, a.jobs});
  Output o(a.out, out);
  if (wants_jsonl(a.format, a.out)) {
    write_score_jsonl(o.stream(), report);
  } else {
    write_score_csv(o.stream(), report);
  }
  for (const auto& e : report.errors) {
    err << nlohmann::json{{"dialogue_id", e.dialogue_id}, {"response_index", e.response_index}, {"error", e.message}}
               .dump()
        << '\n';
  }
  return report.errors.empty() ? 0 : 1;
}

// --- build-dataset -------------------------------------------------------

struct BuildArgs {
  std::string task;
  std::string corpus;
  std::uint64_t seed = 0;
  std::string out;
  std::size_t negative_ratio = 1;
  std::size_t max_conditioning = 1;
  double threshold = kDependenceThreshold;
  std::size_t jobs = 1;
  BackendOptions backend;
};

int cmd_build_dataset(const BuildArgs& a, std::ostream& out, std::ostream& err) {
  const auto corpus = load_corpus(a.corpus);
  Output o(a.out, out);
  if (a.task == "uncond") {
    for (const auto& p : build_uncond_dataset(corpus, a.negative_ratio, a.seed, a.jobs)) o.stream() << to_jsonl(p) << '\n';
  } else if (a.task == "preced2") {
    for (const auto& t : build_preced2_dataset(corpus, a.seed, a.jobs)) o.stream() << to_jsonl(t) << '\n';
  } else {
    const auto backend = a.backend.make();
    const auto ds = build_cond_dataset(corpus, *backend, a.seed, {a.max_conditioning, a.threshold, a.jobs});
    for (const auto& t : ds.examples) o.stream() << to_jsonl(t) << '\n';
    for (const auto& s : ds.skipped) {
      err << nlohmann::json{{"skipped", s.dialogue_id}, {"response_index", s.response_index}, {"reason", s.reason}}
                 .dump()
          << '\n';
    }
  }
  return 0;
}

// --- train ---------------------------------------------------------------

struct TrainArgs {
  std::string task;
  std::string train;
  std::string val;
  std::uint64_t seed = 0;
  std::size_t epochs = LexicalTrainerOptions{}.epochs;
  std::string out;
};

int cmd_train(const TrainArgs& a, std::ostream& out) {
  const auto task = parse_task(a.task);
  const auto train = load_examples(a.train);
  const auto val = a.val.empty() ? std::vector<Example>{} : load_examples(a.val);
  LexicalTrainer trainer({a.seed, a.epochs});
  const auto result = trainer.train(task, train, val, nullptr);
  write_file(a.out, result.checkpoint + "\n");
  out << nlohmann::json{{"model", a.out}, {"val_metrics", {{"accuracy", result.val.accuracy}, {"f1", result.val.f1}}}}
             .dump()
      << '\n';
  return 0;
}

// --- self-train ----------------------------------------------------------

struct SelfTrainArgs {
  std::string train;
  std::string val;
  std::string unlabeled;
  BackendOptions backend;
  std::string trainer = "lexical";
  std::uint64_t seed = 0;
  std::string out_dir;
  double pseudo_threshold = 0.9;
  std::vector<std::size_t> window{2, 3};
  std::size_t max_iterations = 10;
  std::size_t patience = 1;
  std::string metric = "f1";
  std::size_t max_conditioning = 1;
  double threshold = kDependenceThreshold;
  std::size_t epochs = LexicalTrainerOptions{}.epochs;
};

int cmd_self_train(const SelfTrainArgs& a, std::ostream& out) {
  const auto train = load_examples(a.train);
  const auto val = load_examples(a.val);
  std::vector<Query> unlabeled;
  if (!a.unlabeled.empty()) {
    const auto corpus = load_corpus(a.unlabeled);
    const auto backend = a.backend.make();
    unlabeled = build_unlabeled_triples(corpus, *backend, a.seed, {a.max_conditioning, a.threshold, 1});
  }
  std::unique_ptr<Trainer> trainer;
  if (a.trainer == "remote") {
    trainer = std::make_unique<RemoteTrainer>(a.backend.remote());
  } else {
    trainer = std::make_unique<LexicalTrainer>(LexicalTrainerOptions{a.seed, a.epochs});
  }
  SelfTrainConfig config;
  config.pseudo_threshold = a.pseudo_threshold;
  config.position_window = {a.window.begin(), a.window.end()};
  config.max_iterations = a.max_iterations;
  config.patience = a.patience;
  config.selection_metric = a.metric == "accuracy" ? SelectionMetric::accuracy : SelectionMetric::f1;

  const fs::path dir(a.out_dir);
  fs::create_directories(dir);
  const auto result = self_train(*trainer, train, val, unlabeled, config, [&](std::size_t i, const TrainResult& r) {
    write_file(dir / ("cond_iter" + std::to_string(i) + ".model"), r.checkpoint + "\n");
  });
  write_file(dir / "cond_best.model", result.best.checkpoint + "\n");
  write_file(dir / "audit.json", result.audit.to_json() + "\n");
  std::ostringstream data;
  for (const auto& e : result.final_training_set) data << to_jsonl(e) << '\n';
  write_file(dir / "training_set.jsonl", data.str());
  out << nlohmann::json{{"best_iteration", result.audit.best_iteration},
                        {"best_val_metric", result.audit.best_val_metric},
                        {"stop_reason", result.audit.stop_reason}}
             .dump()
      << '\n';
  return 0;
}

// --- correlate -----------------------------------------------------------

struct CorrelateArgs {
  std::string schema = "all";
  std::string judgements;
  std::string scores;
  std::string dimension = "all";
  std::string mode = "full";
  std::string out;
  std::string format = "csv";
};

int cmd_correlate(const CorrelateArgs& a, std::ostream& out) {
  const auto judgements = load_judgements(a.judgements);
  if (judgements.empty()) throw PreconditionError("judgement file " + a.judgements + " is empty");
  const auto scores = load_metric_scores(a.scores, parse_score_mode(a.mode));
  std::vector<Schema> schemas;
  if (a.schema == "all") {
    schemas = {Schema::voting, Schema::ignore_equal, Schema::cont2cat};
  } else {
    schemas = {parse_schema(a.schema)};
  }
  std::vector<Dimension> dims;
  if (a.dimension == "all") {
    for (auto d : kAllDimensions) {
      if (std::any_of(judgements.begin(), judgements.end(), [&](const auto& j) { return j.dimension == d; })) {
        dims.push_back(d);
      }
    }
  } else {
    dims = {parse_dimension(a.dimension)};
  }
  std::vector<CorrelationReport> reports;
  for (auto d : dims) {
    for (auto s : schemas) {
      auto r = correlate(s, judgements, scores, d);
      reports.insert(reports.end(), r.begin(), r.end());
    }
  }
  Output o(a.out, out);
  if (a.format == "json") {
    o.stream() << correlation_json(reports) << '\n';
  } else {
    write_correlation_csv(o.stream(), reports);
  }
  return 0;
}

// --- stats ---------------------------------------------------------------

struct StatsArgs {
  std::vector<std::string> corpora;
  std::string format = "table";
};

std::string two_decimals(double v) {
  std::ostringstream ss;
  ss.setf(std::ios::fixed);
  ss.precision(2);
  ss << v;
  return ss.str();
}

int cmd_stats(const StatsArgs& a, std::ostream& out) {
  std::vector<std::string> names;
  std::vector<CorpusStats> stats;
  for (const auto& path : a.corpora) {
    names.push_back(fs::path(path).stem().string());
    stats.push_back(corpus_stats(load_corpus(path)));
  }
  if (a.format == "json") {
    nlohmann::json arr = nlohmann::json::array();
    for (std::size_t i = 0; i < stats.size(); ++i) {
      const auto& s = stats[i];
      arr.push_back({{"corpus", names[i]},
                     {"pairs", s.pair_count},
                     {"utterances", s.utterance_count},
                     {"direct_cause_utterances", s.direct_cause_utterance_count},
                     {"mean_cause_length_tokens", s.mean_cause_length_tokens},
                     {"stddev_cause_length_tokens", s.stddev_cause_length_tokens},
                     {"mean_cause_fraction", s.mean_cause_fraction},
                     {"stddev_cause_fraction", s.stddev_cause_fraction}});
    }
    out << arr.dump(2) << '\n';
    return 0;
  }
  if (a.format == "csv") {
    out << "corpus,pairs,utterances,direct_cause_utterances,mean_cause_length_tokens,stddev_cause_length_tokens,"
           "mean_cause_fraction,stddev_cause_fraction\n";
    for (std::size_t i = 0; i < stats.size(); ++i) {
      const auto& s = stats[i];
      out << names[i] << ',' << s.pair_count << ',' << s.utterance_count << ',' << s.direct_cause_utterance_count
          << ',' << text::format_double(s.mean_cause_length_tokens) << ','
          << text::format_double(s.stddev_cause_length_tokens) << ',' << text::format_double(s.mean_cause_fraction)
          << ',' << text::format_double(s.stddev_cause_fraction) << '\n';
    }
    return 0;
  }
  // Table layout: one row per statistic, one column per corpus.
  std::vector<std::vector<std::string>> rows = {{"Number of items"},
                                                {"History-response pairs"},
                                                {"Utterances"},
                                                {"Direct causes utterance"},
                                                {"Average length of direct causes"},
                                                {"Percentage of causes in their utterances"}};
  for (std::size_t i = 0; i < stats.size(); ++i) {
    const auto& s = stats[i];
    rows[0].push_back(names[i]);
    rows[1].push_back(std::to_string(s.pair_count));
    rows[2].push_back(std::to_string(s.utterance_count));
    rows[3].push_back(std::to_string(s.direct_cause_utterance_count));
    rows[4].push_back(two_decimals(s.mean_cause_length_tokens) + " (sd=" + two_decimals(s.stddev_cause_length_tokens) +
                      ")");
    rows[5].push_back(two_decimals(s.mean_cause_fraction) + " (sd=" + two_decimals(s.stddev_cause_fraction) + ")");
  }
  std::vector<std::size_t> widths;
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (widths.size() <= c) widths.push_back(0);
      widths[c] = std::max(widths[c], row[c].size());
    }
  }
  for (const auto& row : rows) {
    std::string line;
    for (std::size_t c = 0; c < row.size(); ++c) {
      line += row[c];
      if (c + 1 < row.size()) line += std::string(widths[c] - row[c].size() + 2, ' ');
    }
    out << line << '\n';
  }
  return 0;
}

// --- histogram -----------------------------------------------------------

struct HistogramArgs {
  std::string scores;
  std::size_t bins = 10;
  std::string mode;
  std::string out;
};

int cmd_histogram(const HistogramArgs& a, std::ostream& out) {
  const auto rows = load_score_rows(a.scores);
  std::optional<ScoreMode> mode;
  if (!a.mode.empty()) mode = parse_score_mode(a.mode);
  std::set<ScoreMode> present;
  std::vector<double> scores;
  for (const auto& r : rows) {
    present.insert(r.mode);
    if (!mode || r.mode == *mode) scores.push_back(r.value.score);
  }
  if (!mode && present.size() > 1) throw PreconditionError("score file mixes modes; pick one with --mode");
  const auto counts = score_histogram(scores, a.bins);
  Output o(a.out, out);
  write_histogram_csv(o.stream(), counts);
  return 0;
}

// --- split ---------------------------------------------------------------

struct SplitArgs {
  std::string corpus;
  std::size_t train_n = 0;
  std::size_t val_n = 0;
  std::size_t test_n = 0;
  std::uint64_t seed = 0;
  std::string out_dir;
};

int cmd_split(const SplitArgs& a, std::ostream& out) {
  const auto corpus = load_corpus(a.corpus);
  const auto split = split_corpus(corpus, a.train_n, a.val_n, a.test_n, a.seed);
  const fs::path dir(a.out_dir);
  fs::create_directories(dir);
  save_corpus(dir / "train.jsonl", split.train);
  save_corpus(dir / "val.jsonl", split.validation);
  save_corpus(dir / "test.jsonl", split.test);
  out << nlohmann::json{{"train", split.train.size()}, {"val", split.validation.size()}, {"test", split.test.size()}}
             .dump()
      << '\n';
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  log::ScopedSink sink([&err](log::Level level, std::string_view message) {
    err << (level == log::Level::warning ? "warning: " : "info: ") << message << '\n';
  });

  CLI::App app{"Reference-free dialogue response relevance scoring", "causalscore"};
  app.set_config("--config", "", "key=value config file; command-line flags take precedence");
  app.require_subcommand(1);

  ScoreArgs score;
  auto* sc = app.add_subcommand("score", "Score every response of a corpus");
  sc->add_option("--corpus", score.corpus, "Corpus (JSON Lines)")->required();
  add_backend_options(sc, score.backend);
  sc->add_option("--mode", score.modes, "full | uncond_only | cond_only | max_ci | all")->capture_default_str();
  sc->add_option("--out", score.out, "Output path (default stdout)");
  sc->add_option("--format", score.format, "csv | jsonl (default from --out extension)")
      ->check(CLI::IsMember({"csv", "jsonl"}));
  sc->add_option("--jobs", score.jobs, "Pairs scored in parallel")->capture_default_str();
  sc->add_option("--dep-threshold", score.threshold, "Dependence threshold")->check(open_unit_interval());

  BuildArgs build;
  auto* bd = app.add_subcommand("build-dataset", "Construct classifier training examples");
  bd->add_option("--task", build.task, "uncond | cond | preced2")
      ->required()
      ->check(CLI::IsMember({"uncond", "cond", "preced2"}));
  bd->add_option("--corpus", build.corpus, "Annotated corpus (JSON Lines)")->required();
  bd->add_option("--seed", build.seed, "Random seed")->required();
  bd->add_option("--out", build.out, "Output path (default stdout)");
  bd->add_option("--negative-ratio", build.negative_ratio, "Negatives per positive (uncond)")->capture_default_str();
  bd->add_option("--max-conditioning-per-pair", build.max_conditioning, "Conditioning utterances per cause (cond)")
      ->capture_default_str();
  bd->add_option("--dep-threshold", build.threshold, "Dependence threshold (cond)")->check(open_unit_interval());
  bd->add_option("--jobs", build.jobs, "Pairs processed in parallel")->capture_default_str();
  add_backend_options(bd, build.backend);

  TrainArgs train;
  auto* tr = app.add_subcommand("train", "Fit a lexical classifier on a dataset");
  tr->add_option("--task", train.task, "uncond | cond")->required()->check(CLI::IsMember({"uncond", "cond"}));
  tr->add_option("--train", train.train, "Training examples (JSON Lines)")->required();
  tr->add_option("--val", train.val, "Validation examples (JSON Lines)");
  tr->add_option("--seed", train.seed, "Random seed")->required();
  tr->add_option("--epochs", train.epochs, "Gradient-descent epochs")->capture_default_str();
  tr->add_option("--out", train.out, "Model output path")->required();

  SelfTrainArgs st;
  auto* stc = app.add_subcommand("self-train", "Self-train the conditional classifier");
  stc->add_option("--train", st.train, "Labeled conditional training set")->required();
  stc->add_option("--val", st.val, "Labeled conditional validation set")->required();
  stc->add_option("--unlabeled", st.unlabeled, "Unlabeled corpus (JSON Lines)");
  add_backend_options(stc, st.backend);
  stc->add_option("--trainer", st.trainer, "lexical | remote")
      ->check(CLI::IsMember({"lexical", "remote"}))
      ->capture_default_str();
  stc->add_option("--seed", st.seed, "Random seed")->required();
  stc->add_option("--out-dir", st.out_dir, "Directory for checkpoints and the audit")->required();
  stc->add_option("--pseudo-threshold", st.pseudo_threshold, "Pseudo-label probability threshold")
      ->check(CLI::Range(0.5, 1.0))
      ->capture_default_str();
  stc->add_option("--window", st.window, "Allowed candidate offsets from the response")->delimiter(',');
  stc->add_option("--max-iterations", st.max_iterations, "Self-training rounds")->capture_default_str();
  stc->add_option("--patience", st.patience, "Rounds without improvement before stopping")->capture_default_str();
  stc->add_option("--metric", st.metric, "Validation metric")
      ->check(CLI::IsMember({"f1", "accuracy"}))
      ->capture_default_str();
  stc->add_option("--max-conditioning-per-pair", st.max_conditioning, "Conditioning utterances per candidate")
      ->capture_default_str();
  stc->add_option("--dep-threshold", st.threshold, "Dependence threshold")->check(open_unit_interval());
  stc->add_option("--epochs", st.epochs, "Lexical trainer epochs")->capture_default_str();

  CorrelateArgs corr;
  auto* cc = app.add_subcommand("correlate", "Correlate metric scores with human judgements");
  cc->add_option("--schema", corr.schema, "voting | ignore_equal | cont2cat | all")
      ->check(CLI::IsMember({"voting", "ignore_equal", "cont2cat", "all"}))
      ->capture_default_str();
  cc->add_option("--judgements", corr.judgements, "Pairwise judgements (JSON Lines)")->required();
  cc->add_option("--scores", corr.scores, "Score report or history_id,source,score CSV")->required();
  cc->add_option("--dimension", corr.dimension, "Dimension name or all")->capture_default_str();
  cc->add_option("--mode", corr.mode, "Score mode to read from a score report")->capture_default_str();
  cc->add_option("--out", corr.out, "Output path (default stdout)");
  cc->add_option("--format", corr.format, "csv | json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

  StatsArgs stats;
  auto* ss = app.add_subcommand("stats", "Corpus statistics table");
  ss->add_option("--corpus", stats.corpora, "Corpus file(s); one column each")->required();
  ss->add_option("--format", stats.format, "table | csv | json")
      ->check(CLI::IsMember({"table", "csv", "json"}))
      ->capture_default_str();

  HistogramArgs hist;
  auto* hc = app.add_subcommand("histogram", "Score distribution as CSV");
  hc->add_option("--scores", hist.scores, "Score report (CSV or JSON Lines)")->required();
  hc->add_option("--bins", hist.bins, "Number of bins")->check(CLI::PositiveNumber)->capture_default_str();
  hc->add_option("--mode", hist.mode, "Restrict to one score mode");
  hc->add_option("--out", hist.out, "Output path (default stdout)");

  SplitArgs split;
  auto* spc = app.add_subcommand("split", "Dialogue-atomic train/val/test split");
  spc->add_option("--corpus", split.corpus, "Corpus (JSON Lines)")->required();
  spc->add_option("--train-n", split.train_n, "Training pairs")->required();
  spc->add_option("--val-n", split.val_n, "Validation pairs")->required();
  spc->add_option("--test-n", split.test_n, "Test pairs")->required();
  spc->add_option("--seed", split.seed, "Random seed")->required();
  spc->add_option("--out-dir", split.out_dir, "Directory for train/val/test.jsonl")->required();

  std::vector<std::string> argv_storage = args;
  argv_storage.insert(argv_storage.begin(), "causalscore");
  std::vector<char*> argv;
  for (auto& s : argv_storage) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, err, err);
    return 2;
  }

  try {
    if (*sc) return cmd_score(score, out, err);
    if (*bd) return cmd_build_dataset(build, out, err);
    if (*tr) return cmd_train(train, out);
    if (*stc) return cmd_self_train(st, out);
    if (*cc) return cmd_correlate(corr, out);
    if (*ss) return cmd_stats(stats, out);
    if (*hc) return cmd_histogram(hist, out);
    if (*spc) return cmd_split(split, out);
  } catch (const Error& e) {
    err << error_json(e.kind(), e.what()) << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << error_json("internal_error", e.what()) << '\n';
    return 1;
  }
  return 2;
}

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace causalscore::cli
