#include <doctest.h>

#include <sstream>

#include <json.hpp>

#include "causalscore/cli.hpp"
#include "causalscore/corpus.hpp"
#include "causalscore/datasets.hpp"
#include "causalscore/lexical.hpp"
#include "support.hpp"

using namespace causalscore;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string d(const std::string& name) { return testing::data(name).string(); }

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("score with the fixture backend reproduces the golden csv") {
    auto r = run({"score", "--corpus", d("score_corpus.jsonl"), "--backend", "fixture", "--fixtures",
                  d("fixtures.jsonl"), "--mode", "full"});
    CHECK(r.code == 0);
    CHECK(r.out == testing::slurp(testing::data("golden_scores_full.csv")));
  }

  TEST_CASE("score writes jsonl to a file") {
    testing::TempDir tmp("cli_score");
    auto r = run({"score", "--corpus", d("score_corpus.jsonl"), "--backend", "fixture", "--fixtures",
                  d("fixtures.jsonl"), "--mode", "all", "--out", (tmp / "s.jsonl").string()});
    CHECK(r.code == 0);
    CHECK(r.out.empty());
    std::istringstream in(testing::slurp(tmp / "s.jsonl"));
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
      auto j = nlohmann::json::parse(line);
      CHECK(j.contains("score"));
      ++n;
    }
    CHECK(n == 12);
  }

  TEST_CASE("score reports failing pairs and exits 1") {
    // The fixture only covers three of the nine pairs.
    auto r = run({"score", "--corpus", d("corpus.jsonl"), "--backend", "fixture", "--fixtures", d("fixtures.jsonl")});
    CHECK(r.code == 1);
    std::istringstream out(r.out);
    std::string line;
    int rows = -1;
    while (std::getline(out, line)) ++rows;
    CHECK(rows == 3);
    CHECK(r.err.find("fixture miss") != std::string::npos);
  }

  TEST_CASE("stats table matches the hand count") {
    auto r = run({"stats", "--corpus", d("corpus.jsonl")});
    CHECK(r.code == 0);
    CHECK(r.out ==
          "Number of items                           corpus\n"
          "History-response pairs                    9\n"
          "Utterances                                17\n"
          "Direct causes utterance                   10\n"
          "Average length of direct causes           3.80 (sd=1.60)\n"
          "Percentage of causes in their utterances  0.78 (sd=0.30)\n");
    auto j = run({"stats", "--corpus", d("corpus.jsonl"), "--corpus", d("score_corpus.jsonl"), "--format", "json"});
    auto arr = nlohmann::json::parse(j.out);
    REQUIRE(arr.size() == 2);
    CHECK(arr[1]["pairs"] == 3);
  }

  TEST_CASE("usage errors exit 2") {
    CHECK(run({"score", "--bogus"}).code == 2);
    CHECK(run({}).code == 2);
    CHECK(run({"build-dataset", "--task", "uncond", "--corpus", d("corpus.jsonl")}).code == 2);  // no --seed
    CHECK(run({"score", "--corpus", d("corpus.jsonl"), "--dep-threshold", "1.5"}).code == 2);
    CHECK(run({"build-dataset", "--task", "nope", "--corpus", d("corpus.jsonl"), "--seed", "1"}).code == 2);
    auto help = run({"--help"});
    CHECK(help.code == 0);
    CHECK(help.out.find("score") != std::string::npos);
  }

  TEST_CASE("runtime errors print a JSON object and exit 1") {
    auto r = run({"stats", "--corpus", "/nonexistent/corpus.jsonl"});
    CHECK(r.code == 1);
    auto j = nlohmann::json::parse(r.err);
    CHECK(j["kind"] == "precondition_error");
    CHECK(j["error"].get<std::string>().find("/nonexistent") != std::string::npos);
    CHECK(r.out.empty());
  }

  TEST_CASE("config file supplies options and flags win") {
    testing::TempDir tmp("cli_config");
    testing::spit(tmp / "run.conf", "[score]\ncorpus=" + d("score_corpus.jsonl") +
                                        "\nbackend=fixture\nfixtures=" + d("fixtures.jsonl") + "\nmode=uncond_only\n");
    auto from_file = run({"--config", (tmp / "run.conf").string(), "score"});
    CHECK(from_file.code == 0);
    CHECK(from_file.out.find(",uncond_only,") != std::string::npos);
    auto overridden = run({"--config", (tmp / "run.conf").string(), "score", "--mode", "full"});
    CHECK(overridden.out == testing::slurp(testing::data("golden_scores_full.csv")));
  }

  TEST_CASE("histogram") {
    testing::TempDir tmp("cli_hist");
    run({"score", "--corpus", d("score_corpus.jsonl"), "--backend", "fixture", "--fixtures", d("fixtures.jsonl"),
         "--mode", "all", "--out", (tmp / "all.csv").string()});
    auto mixed = run({"histogram", "--scores", (tmp / "all.csv").string(), "--bins", "2"});
    CHECK(mixed.code == 1);
    auto full = run({"histogram", "--scores", (tmp / "all.csv").string(), "--bins", "2", "--mode", "full"});
    CHECK(full.code == 0);
    // full scores 0.75, 0.45, 0.6708...
    CHECK(full.out == "bin_start,bin_end,count\n0,0.5,1\n0.5,1,2\n");
    CHECK(run({"histogram", "--scores", (tmp / "all.csv").string(), "--bins", "0"}).code == 2);
  }

  TEST_CASE("correlate joins on history_id@source") {
    testing::TempDir tmp("cli_corr");
    std::string judgements;
    const char* choices[] = {"A_better", "B_better", "A_better", "both_good", "A_better", "both_bad"};
    for (int h = 0; h < 6; ++h) {
      for (int a = 0; a < 2; ++a) {
        nlohmann::json j = {{"comparison_id", "c" + std::to_string(h)},
                            {"history_id", "h" + std::to_string(h)},
                            {"source_a", "causal"},
                            {"source_b", "base"},
                            {"dimension", "relevance"},
                            {"annotator_id", "ann" + std::to_string(a)},
                            {"choice", choices[(h + a) % 6]}};
        judgements += j.dump() + "\n";
      }
    }
    testing::spit(tmp / "j.jsonl", judgements);
    std::string scores = "history_id,source,score\n";
    for (int h = 0; h < 6; ++h) {
      scores += "h" + std::to_string(h) + ",causal," + std::to_string(0.1 * (h + 1)) + "\n";
      scores += "h" + std::to_string(h) + ",base," + std::to_string(0.9 - 0.1 * h) + "\n";
    }
    testing::spit(tmp / "s.csv", scores);
    auto r = run({"correlate", "--judgements", (tmp / "j.jsonl").string(), "--scores", (tmp / "s.csv").string()});
    CHECK(r.code == 0);
    std::istringstream out(r.out);
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(out, line)) lines.push_back(line);
    REQUIRE(lines.size() == 5);
    CHECK(lines[0] == "schema,dimension,statistic,value,p_value,n,ties,skipped");
    CHECK(lines[1].rfind("voting,relevance,pearson,", 0) == 0);
    CHECK(lines[3].rfind("ignore_equal,relevance,point_biserial,", 0) == 0);
    CHECK(lines[4].rfind("cont2cat,relevance,krippendorff_alpha,", 0) == 0);

    auto json = run({"correlate", "--judgements", (tmp / "j.jsonl").string(), "--scores", (tmp / "s.csv").string(),
                     "--schema", "voting", "--format", "json"});
    CHECK(nlohmann::json::parse(json.out).size() == 2);

    testing::spit(tmp / "empty.jsonl", "");
    CHECK(run({"correlate", "--judgements", (tmp / "empty.jsonl").string(), "--scores", (tmp / "s.csv").string()})
              .code == 1);
  }

  TEST_CASE("build-dataset, train, self-train pipeline") {
    testing::TempDir tmp("cli_pipeline");
    const auto corpus = d("corpus.jsonl");
    auto u = run({"build-dataset", "--task", "uncond", "--corpus", corpus, "--seed", "3", "--out",
                  (tmp / "uncond.jsonl").string()});
    REQUIRE(u.code == 0);
    auto t = run({"train", "--task", "uncond", "--train", (tmp / "uncond.jsonl").string(), "--val",
                  (tmp / "uncond.jsonl").string(), "--seed", "3", "--out", (tmp / "uncond.model").string()});
    REQUIRE(t.code == 0);
    CHECK(nlohmann::json::parse(t.out).contains("val_metrics"));
    auto model = LexicalModel::load(tmp / "uncond.model");
    CHECK(model.task() == Task::uncond);

    auto c = run({"build-dataset", "--task", "preced2", "--corpus", corpus, "--seed", "3", "--out",
                  (tmp / "cond.jsonl").string()});
    REQUIRE(c.code == 0);
    auto s = run({"self-train", "--train", (tmp / "cond.jsonl").string(), "--val", (tmp / "cond.jsonl").string(),
                  "--unlabeled", corpus, "--uncond-model", (tmp / "uncond.model").string(), "--seed", "3",
                  "--out-dir", (tmp / "st").string(), "--pseudo-threshold", "0.6"});
    REQUIRE(s.code == 0);
    CHECK(std::filesystem::exists(tmp / "st" / "cond_iter0.model"));
    CHECK(std::filesystem::exists(tmp / "st" / "cond_best.model"));
    auto audit = nlohmann::json::parse(testing::slurp(tmp / "st" / "audit.json"));
    CHECK(audit.contains("stop_reason"));
    const auto best = audit["best_iteration"].get<std::size_t>();
    CHECK(testing::slurp(tmp / "st" / "cond_best.model") ==
          testing::slurp(tmp / "st" / ("cond_iter" + std::to_string(best) + ".model")));
    auto final_set = load_examples(tmp / "st" / "training_set.jsonl");
    CHECK(final_set.size() >= load_examples(tmp / "cond.jsonl").size());

    auto cond_build = run({"build-dataset", "--task", "cond", "--corpus", corpus, "--seed", "3", "--uncond-model",
                           (tmp / "uncond.model").string()});
    CHECK(cond_build.code == 0);

    auto scored = run({"score", "--corpus", corpus, "--uncond-model", (tmp / "uncond.model").string(),
                       "--cond-model", (tmp / "st" / "cond_best.model").string(), "--mode", "all", "--jobs", "2"});
    CHECK(scored.code == 0);
  }

  TEST_CASE("split writes three dialogue-atomic corpora") {
    testing::TempDir tmp("cli_split");
    auto r = run({"split", "--corpus", d("corpus.jsonl"), "--train-n", "4", "--val-n", "2", "--test-n", "1", "--seed",
                  "1", "--out-dir", tmp.path().string()});
    REQUIRE(r.code == 0);
    CHECK(load_corpus(tmp / "train.jsonl").size() == 4);
    CHECK(load_corpus(tmp / "val.jsonl").size() == 2);
    CHECK(load_corpus(tmp / "test.jsonl").size() == 1);
  }
}
