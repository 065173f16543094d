#include <doctest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "qinu/evaluation.hpp"
#include "qinu/fixture.hpp"

using namespace qinu;

namespace {

GoldRecord rec(const std::string& id, Topic t, Tokens tokens = {"w"}) {
  GoldRecord r;
  r.sentence_id = id;
  r.topic = t;
  r.length_tokens = tokens.size();
  if (t != Topic::Other) r.keyword_span = TokenSpan{0, 1};
  r.tokens = std::move(tokens);
  return r;
}

LabeledDataset sized(std::array<std::size_t, kTopicCount> counts) {
  LabeledDataset d;
  for (std::size_t c = 0; c < kTopicCount; ++c)
    for (std::size_t i = 0; i < counts[c]; ++i) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "c%zu-%04zu", c, i);
      d.push_back(rec(buf, kAllTopics[c]));
    }
  return d;
}

const Fixture& fixture() {
  static const Fixture fx = generate_fixture({}, {});
  return fx;
}

EvalConfig fixture_config() {
  EvalConfig c;
  c.taxonomy = std::make_shared<const Taxonomy>(fixture().taxonomy);
  c.config_hash = "test";
  return c;
}

}  // namespace

TEST_CASE("stratified folds on (300, 200, 100)") {
  const LabeledDataset d = sized({300, 200, 100, 0});
  const FoldPlan plan = stratified_folds(d, 3, 42);
  std::array<std::array<std::size_t, kTopicCount>, 3> per{};
  for (std::size_t i = 0; i < d.size(); ++i) ++per[plan.fold_of[i]][index_of(d[i].topic)];
  for (std::size_t f = 0; f < 3; ++f) {
    CHECK(per[f][0] == 100);
    CHECK((per[f][1] == 66 || per[f][1] == 67));
    CHECK((per[f][2] == 33 || per[f][2] == 34));
    CHECK(plan.test_indices(f).size() == 200);
    CHECK(plan.train_indices(f).size() == 400);
  }
  CHECK(stratified_folds(d, 3, 42).fold_of == plan.fold_of);
  CHECK(stratified_folds(d, 3, 43).fold_of != plan.fold_of);
}

TEST_CASE("fold spread is at most one for random class sizes (property)") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t k = 2 + rng() % 4;
    std::array<std::size_t, kTopicCount> counts{};
    for (auto& c : counts) c = rng() % 3 == 0 ? 0 : k + rng() % 40;
    if (std::all_of(counts.begin(), counts.end(), [](auto c) { return c == 0; })) counts[0] = k;
    const LabeledDataset d = sized(counts);
    const FoldPlan plan = stratified_folds(d, k, rng());
    for (std::size_t c = 0; c < kTopicCount; ++c) {
      std::vector<std::size_t> sizes(k, 0);
      for (std::size_t i = 0; i < d.size(); ++i)
        if (index_of(d[i].topic) == c) ++sizes[plan.fold_of[i]];
      if (counts[c] == 0) continue;
      const auto [lo, hi] = std::minmax_element(sizes.begin(), sizes.end());
      CHECK(*hi - *lo <= 1);
    }
  }
}

TEST_CASE("stratification preconditions") {
  try {
    stratified_folds(sized({10, 2, 10, 1}), 3, 1);
    FAIL("expected error");
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("efficiency (2)") != std::string::npos);
    CHECK(msg.find("other (1)") != std::string::npos);
  }
  CHECK_THROWS_AS(stratified_folds(sized({10, 10, 10, 10}), 1, 1), ValidationError);
}

TEST_CASE("metric examples") {
  SUBCASE("TP=8 FP=2 FN=4") {
    ConfusionMatrix cm;
    std::vector<Topic> gold;
    auto add = [&](Topic g, Topic p, int n) {
      for (int i = 0; i < n; ++i) {
        cm.add(g, p);
        gold.push_back(g);
      }
    };
    add(Topic::Efficiency, Topic::Efficiency, 8);
    add(Topic::Other, Topic::Efficiency, 2);
    add(Topic::Efficiency, Topic::Other, 4);
    const Metrics m = compute_metrics(cm, {}, gold);
    const ClassMetrics& e = m.per_class[index_of(Topic::Efficiency)];
    CHECK(e.precision == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(e.recall == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(e.f1 == doctest::Approx(16.0 / 22.0).epsilon(1e-12));
    CHECK(e.f1 == doctest::Approx(0.7273).epsilon(1e-4));
    CHECK_FALSE(m.macro_auc.has_value());  // no scores supplied
  }
  SUBCASE("perfect predictions") {
    oracle::Instance in;
    for (std::size_t i = 0; i < 12; ++i) {
      const Topic t = kAllTopics[i % 4];
      in.gold.push_back(t);
      in.predicted.push_back(t);
      TopicScores s{};
      s[index_of(t)] = 1.0;
      in.scores.push_back(s);
    }
    const Metrics m = oracle::metrics_of(in);
    CHECK(m.accuracy == 1.0);
    CHECK(m.macro_f1 == 1.0);
    for (const auto& c : m.per_class) CHECK(*c.auc == 1.0);
  }
  SUBCASE("AUC with one concordant and one discordant pair") {
    CHECK(*auc_rank({0.9, 0.8, 0.7}, {true, false, true}) == 0.5);
    CHECK(*auc_rank({0.5, 0.5}, {true, false}) == 0.5);
    CHECK_FALSE(auc_rank({0.1, 0.2}, {true, true}).has_value());
  }
  SUBCASE("inconsistent inputs") {
    ConfusionMatrix cm;
    cm.add(Topic::Other, Topic::Other);
    CHECK_THROWS_AS(compute_metrics(cm, {}, {Topic::Other, Topic::Other}), ValidationError);
    CHECK_THROWS_AS(compute_metrics(cm, {}, {Topic::Efficiency}), ValidationError);
  }
}

TEST_CASE("metrics agree with the brute-force oracle") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const oracle::Instance in = oracle::random_instance(rng);
    const Metrics m = oracle::metrics_of(in);
    CHECK(oracle::max_abs_error(oracle::brute_force(in), m) <= 1e-9);
    CHECK(std::abs(m.micro_f1 - m.accuracy) <= 1e-12);
  }
}

TEST_CASE("length buckets") {
  const std::vector<Topic> g = {Topic::Other, Topic::Efficiency, Topic::Efficiency};
  auto r = length_bucket_report(g, g, {3, 3, 3});
  REQUIRE(r.buckets.size() == 4);
  CHECK(r.buckets[0].support == 3);
  for (std::size_t b = 1; b < 4; ++b) CHECK(r.buckets[b].support == 0);
  CHECK(r.buckets[0].label() == "1-4");
  CHECK(r.buckets[3].label() == "13+");

  r = length_bucket_report(g, {Topic::Other, Topic::Other, Topic::Efficiency}, {0, 9, 40});
  CHECK(r.buckets[0].support == 1);
  CHECK(r.buckets[2].support == 1);
  CHECK(r.buckets[3].support == 1);
  CHECK(r.buckets[2].macro_f1 == 0.0);
  CHECK_THROWS_AS(length_bucket_report(g, g, {1, 2}), ValidationError);
}

TEST_CASE("keyword ranking") {
  LabeledDataset d;
  for (int i = 0; i < 5; ++i) d.push_back(rec("f" + std::to_string(i), Topic::Efficiency, {"Fast"}));
  for (int i = 0; i < 3; ++i) d.push_back(rec("s" + std::to_string(i), Topic::Efficiency, {"speed"}));
  d.push_back(rec("m", Topic::Efficiency, {"memory"}));
  d.push_back(rec("l", Topic::Efficiency, {"load"}));
  d.push_back(rec("o", Topic::Other, {"box"}));
  auto k = top_keywords(d, 2);
  const auto& eff = k.per_topic.at(Topic::Efficiency);
  REQUIRE(eff.size() == 2);
  CHECK(eff[0] == std::pair<std::string, std::size_t>{"fast", 5});
  CHECK(eff[1].first == "speed");
  CHECK_FALSE(k.per_topic.contains(Topic::Other));

  k = top_keywords(d, 10);
  REQUIRE(k.per_topic.at(Topic::Efficiency).size() == 4);
  CHECK(k.per_topic.at(Topic::Efficiency)[2].first == "load");  // tie broken lexicographically
  CHECK_THROWS_AS(top_keywords({rec("o", Topic::Other)}, 5), ValidationError);
}

TEST_CASE("cross-validation on the fixture") {
  const auto& gold = fixture().gold;
  const EvalConfig cfg = fixture_config();
  const EvalReport r = cross_validate(gold, ClassifierKind::NaiveBayes, 3, 42, cfg);
  CHECK(r.pooled.macro_f1 >= 0.8);
  CHECK(r.pooled.total == gold.size());
  CHECK(std::abs(r.pooled.micro_f1 - r.pooled.accuracy) <= 1e-12);
  REQUIRE(r.folds.size() == 3);
  std::size_t total = 0;
  for (const FoldResult& f : r.folds) {
    CHECK(f.leakage_check_passed);
    CHECK(f.train_size + f.test_size == gold.size());
    total += f.test_size;
  }
  CHECK(total == gold.size());
  std::size_t bucket_total = 0;
  for (const auto& b : r.length_buckets.buckets) bucket_total += b.support;
  CHECK(bucket_total == gold.size());
  CHECK(r.length_buckets.buckets[0].macro_f1 <= r.length_buckets.buckets[2].macro_f1);

  SUBCASE("record order does not matter") {
    LabeledDataset shuffled = gold;
    std::mt19937_64 rng(1);
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const EvalReport s = cross_validate(shuffled, ClassifierKind::NaiveBayes, 3, 42, cfg);
    CHECK(std::abs(s.pooled.accuracy - r.pooled.accuracy) <= 1e-12);
    CHECK(eval_report_to_json(s) == eval_report_to_json(r));
  }
  SUBCASE("report JSON shape") {
    const auto j = eval_report_to_json(r);
    for (const char* key : {"classifier", "k", "seed", "folds", "pooled", "length_buckets", "keywords", "config_hash"})
      CHECK(j.contains(key));
    CHECK(j["classifier"] == "nb");
    CHECK(j["folds"].size() == 3);
    CHECK(render_eval_report(r).find("macro-F1") != std::string::npos);
  }
}

TEST_CASE("k equal to the smallest class still runs") {
  LabeledDataset d;
  const auto& gold = fixture().gold;
  std::array<std::size_t, kTopicCount> taken{};
  for (const auto& g : gold) {
    const std::size_t c = index_of(g.topic);
    if (taken[c] < (g.topic == Topic::Other ? 4u : 20u)) {
      d.push_back(g);
      ++taken[c];
    }
  }
  const EvalReport r = cross_validate(d, ClassifierKind::Svm, 4, 3, fixture_config());
  REQUIRE(r.folds.size() == 4);
  for (const FoldResult& f : r.folds) CHECK(f.test_support[index_of(Topic::Other)] == 1);
  CHECK_THROWS_AS(cross_validate(d, ClassifierKind::Svm, 5, 3, fixture_config()), ValidationError);
}
