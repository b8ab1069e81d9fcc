#include <doctest.h>

#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include "causalscore/datasets.hpp"
#include "causalscore/error.hpp"
#include "causalscore/fixture.hpp"
#include "support.hpp"

using namespace causalscore;

namespace {

using PositiveRow = std::tuple<std::string, std::size_t, std::size_t, std::string>;

std::vector<PositiveRow> read_golden_positives() {
  std::ifstream in(testing::data("uncond_positives.csv"));
  std::string line;
  std::getline(in, line);  // header
  std::vector<PositiveRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string d, c, r, prov;
    std::getline(ss, d, ',');
    std::getline(ss, c, ',');
    std::getline(ss, r, ',');
    std::getline(ss, prov, ',');
    rows.emplace_back(d, std::stoul(c), std::stoul(r), prov);
  }
  return rows;
}

// Uncond probabilities from a table keyed by (dialogue, candidate).
testing::FunctionBackend table_backend(std::map<std::pair<std::string, std::size_t>, double> table,
                                       double fallback = 0.1) {
  return testing::FunctionBackend([table = std::move(table), fallback](const Query& q) {
    auto it = table.find({q.candidate.dialogue_id, q.candidate.index});
    return it == table.end() ? fallback : it->second;
  });
}

}  // namespace

TEST_SUITE("datasets") {
  TEST_CASE("uncond positives match the hand-enumerated golden file") {
    auto corpus = load_corpus(testing::data("corpus.jsonl"));
    auto ds = build_uncond_dataset(corpus, 1, 17);
    std::vector<PositiveRow> positives;
    std::size_t negatives = 0;
    for (const auto& p : ds) {
      if (p.label == 1) {
        CHECK(p.candidate.dialogue_id == p.response.dialogue_id);
        positives.emplace_back(p.response.dialogue_id, p.candidate.index, p.response.index,
                               std::string(to_string(p.provenance)));
      } else {
        ++negatives;
        CHECK(p.provenance == Provenance::random_negative);
        CHECK(p.candidate.dialogue_id != p.response.dialogue_id);
      }
    }
    CHECK(positives == read_golden_positives());
    CHECK(negatives == positives.size());
  }

  TEST_CASE("construction rule on a three-utterance history") {
    auto a = testing::make_pair("a", 3, {0});
    auto b = testing::make_pair("b", 3, {2});
    auto ds = build_uncond_dataset(Corpus::from_pairs({a, b}), 1, 1);
    std::vector<std::tuple<std::string, std::size_t, Provenance>> pos;
    for (const auto& p : ds) {
      if (p.label == 1) pos.emplace_back(p.candidate.dialogue_id, p.candidate.index, p.provenance);
    }
    CHECK(pos == std::vector<std::tuple<std::string, std::size_t, Provenance>>{
                     {"a", 0, Provenance::annotated_cause},
                     {"a", 2, Provenance::preceding},
                     {"b", 2, Provenance::annotated_cause}});
  }

  TEST_CASE("negative ratio scales the negatives") {
    auto corpus = load_corpus(testing::data("corpus.jsonl"));
    for (std::size_t ratio : {0u, 1u, 3u}) {
      auto ds = build_uncond_dataset(corpus, ratio, 2);
      std::size_t pos = 0, neg = 0;
      for (const auto& p : ds) (p.label ? pos : neg)++;
      CHECK(neg == ratio * pos);
    }
  }

  TEST_CASE("uncond builder is deterministic and job-count independent") {
    auto corpus = load_corpus(testing::data("corpus.jsonl"));
    auto dump = [](const std::vector<LabeledPair>& ds) {
      std::string s;
      for (const auto& p : ds) s += to_jsonl(p) + "\n";
      return s;
    };
    CHECK(dump(build_uncond_dataset(corpus, 2, 9)) == dump(build_uncond_dataset(corpus, 2, 9)));
    CHECK(dump(build_uncond_dataset(corpus, 2, 9)) == dump(build_uncond_dataset(corpus, 2, 9, 4)));
    CHECK(dump(build_uncond_dataset(corpus, 2, 9)) != dump(build_uncond_dataset(corpus, 2, 10)));
  }

  TEST_CASE("single dialogue corpus is rejected") {
    auto c = Corpus::from_pairs({testing::make_pair("a", 2, {0}), testing::make_pair("a", 3, {1})});
    CHECK_THROWS_AS(build_uncond_dataset(c, 1, 1), PreconditionError);
    CHECK_THROWS_AS(build_preced2_dataset(c, 1), PreconditionError);
  }

  TEST_CASE("cond dataset: positive with dependent conditioning, negatives from non-causes") {
    auto p = testing::make_pair("a", 3, {1});
    auto backend = table_backend({{{"a", 1}, 0.8}, {{"a", 2}, 0.7}, {{"a", 0}, 0.2}});
    auto ds = build_cond_dataset(Corpus::from_pairs({p}), backend, 4);
    CHECK(ds.skipped.empty());
    REQUIRE(ds.examples.size() == 3);
    const auto& pos = ds.examples[0];
    CHECK(pos.label == 1);
    CHECK(pos.provenance == Provenance::annotated_cause);
    CHECK(pos.candidate.index == 1);
    CHECK(pos.conditioning->index == 2);
    CHECK(pos.conditioning_prob == 0.7);
    std::set<std::size_t> neg;
    for (std::size_t k = 1; k < 3; ++k) {
      const auto& e = ds.examples[k];
      CHECK(e.label == 0);
      CHECK(e.provenance == Provenance::non_cause);
      CHECK(e.candidate.index != e.conditioning->index);
      CHECK(*e.conditioning_prob > 0.5);
      neg.insert(e.candidate.index);
    }
    CHECK(neg == std::set<std::size_t>{0, 2});
    // c0 keeps the positive's conditioning; c2 cannot condition on itself.
    CHECK(ds.examples[1].conditioning->index == 2);
    CHECK(ds.examples[2].conditioning->index == 1);
  }

  TEST_CASE("cond dataset skips a pair whose only dependent utterance is the cause") {
    testing::LogCapture log;
    auto p = testing::make_pair("a", 3, {1});
    auto backend = table_backend({{{"a", 1}, 0.9}});
    auto ds = build_cond_dataset(Corpus::from_pairs({p}), backend, 4);
    CHECK(ds.examples.empty());
    REQUIRE(ds.skipped.size() == 1);
    CHECK(ds.skipped[0].dialogue_id == "a");
    CHECK(log.contains("skipped dialogue a"));
  }

  TEST_CASE("cond dataset with all probabilities 0.4 is empty") {
    auto corpus = load_corpus(testing::data("corpus.jsonl"));
    testing::FunctionBackend flat([](const Query&) { return 0.4; });
    auto ds = build_cond_dataset(corpus, flat, 1);
    CHECK(ds.examples.empty());
    CHECK(ds.skipped.size() == corpus.size());
  }

  TEST_CASE("cond dataset conditioning cap picks the most dependent utterances") {
    auto p = testing::make_pair("a", 5, {0});
    auto backend = table_backend({{{"a", 1}, 0.6}, {{"a", 2}, 0.95}, {{"a", 3}, 0.7}, {{"a", 4}, 0.8}});
    CondDatasetOptions opt;
    opt.max_conditioning_per_pair = 2;
    auto ds = build_cond_dataset(Corpus::from_pairs({p}), backend, 1, opt);
    std::vector<std::size_t> conds;
    for (const auto& e : ds.examples) {
      if (e.label == 1) conds.push_back(e.conditioning->index);
    }
    CHECK(conds == std::vector<std::size_t>{2, 4});
  }

  TEST_CASE("cond dataset conditionings are re-checkable against the backend") {
    auto corpus = load_corpus(testing::data("corpus.jsonl"));
    testing::FunctionBackend backend([](const Query& q) { return 0.3 + 0.15 * static_cast<double>(q.candidate.index % 4); });
    auto ds = build_cond_dataset(corpus, backend, 8);
    CHECK_FALSE(ds.examples.empty());
    for (const auto& e : ds.examples) {
      CHECK(e.candidate.index != e.conditioning->index);
      CHECK(backend.predict(Query{Task::uncond, *e.conditioning, std::nullopt, e.response}) == *e.conditioning_prob);
      CHECK(*e.conditioning_prob > 0.5);
    }
  }

  TEST_CASE("preced2 positives are exactly offsets 1 and 2") {
    auto corpus = load_corpus(testing::data("corpus.jsonl"));
    auto ds = build_preced2_dataset(corpus, 5);
    std::map<std::pair<std::string, std::size_t>, std::multiset<std::size_t>> offsets;
    std::size_t neg = 0;
    for (const auto& t : ds) {
      if (t.label == 1) {
        offsets[{t.response.dialogue_id, t.response.index}].insert(t.response.index - t.candidate.index);
      } else {
        ++neg;
        CHECK(t.candidate.dialogue_id != t.response.dialogue_id);
      }
    }
    for (const auto& p : corpus.pairs()) {
      const auto& got = offsets[{p.dialogue_id, p.response_index}];
      if (p.response_index == 1) {
        CHECK(got == std::multiset<std::size_t>{1});
      } else {
        CHECK(got == std::multiset<std::size_t>{1, 2});
      }
    }
    CHECK(neg == 2 * corpus.size());
  }

  TEST_CASE("preced2 on a length-3 history and a length-1 history") {
    auto ds = build_preced2_dataset(Corpus::from_pairs({testing::make_pair("a", 3), testing::make_pair("b", 1)}), 1);
    std::vector<std::pair<std::size_t, std::optional<std::size_t>>> pos;
    for (const auto& t : ds) {
      if (t.label == 1) {
        pos.emplace_back(t.candidate.index,
                         t.conditioning ? std::optional<std::size_t>(t.conditioning->index) : std::nullopt);
      }
    }
    CHECK(pos == std::vector<std::pair<std::size_t, std::optional<std::size_t>>>{
                     {2, 1}, {1, 2}, {0, std::nullopt}});
  }

  TEST_CASE("preced2 is byte-identical across runs") {
    auto corpus = Corpus::from_pairs({testing::make_pair("a", 2), testing::make_pair("b", 3)});
    std::string x, y;
    for (const auto& t : build_preced2_dataset(corpus, 3)) x += to_jsonl(t) + "\n";
    for (const auto& t : build_preced2_dataset(corpus, 3, 2)) y += to_jsonl(t) + "\n";
    CHECK(x == y);
  }

  TEST_CASE("unlabeled triples cover every candidate with a dependent conditioning") {
    auto p = testing::make_pair("a", 4);
    auto backend = table_backend({{{"a", 1}, 0.9}, {{"a", 3}, 0.6}});
    auto qs = build_unlabeled_triples(Corpus::from_pairs({p}), backend, 2);
    std::vector<std::pair<std::size_t, std::size_t>> got;
    for (const auto& q : qs) got.emplace_back(q.candidate.index, q.conditioning->index);
    CHECK(got == std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}, {1, 3}, {2, 1}, {3, 1}});
  }

  TEST_CASE("examples jsonl round-trip") {
    auto corpus = load_corpus(testing::data("corpus.jsonl"));
    auto ds = build_preced2_dataset(corpus, 5);
    std::string text;
    for (const auto& t : ds) text += to_jsonl(t) + "\n";
    std::istringstream in(text);
    auto back = parse_examples(in);
    REQUIRE(back.size() == ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
      auto e = ds[i].to_example();
      CHECK(back[i].label == e.label);
      CHECK(back[i].provenance == e.provenance);
      CHECK(back[i].query.serialize() == e.query.serialize());
      CHECK(back[i].query.candidate == e.query.candidate);
    }
    std::istringstream bad(R"({"task":"cond","candidate":{"dialogue_id":"a","index":0,"text":"x"},"response":{"dialogue_id":"a","index":1,"text":"y"},"label":2})");
    CHECK_THROWS_AS(parse_examples(bad), InvariantError);
  }
}
