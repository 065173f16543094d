#include <doctest.h>

#include <filesystem>
#include <map>

#include "qinu/corpus.hpp"
#include "qinu/fixture.hpp"
#include "test_support.hpp"

using namespace qinu;

TEST_CASE("fixture shape") {
  const Fixture fx = generate_fixture({}, {});
  CHECK(fx.reviews.size() == 60);
  CHECK(fx.gold.size() == 600);
  std::map<Topic, std::size_t> topics;
  std::map<int, std::size_t> stars;
  for (const auto& g : fx.gold) ++topics[g.topic];
  for (const auto& r : fx.reviews) ++stars[r.stars];
  CHECK(topics[Topic::Effectiveness] == 170);
  CHECK(topics[Topic::Efficiency] == 170);
  CHECK(topics[Topic::FreedomFromRisk] == 160);
  CHECK(topics[Topic::Other] == 100);
  for (int s = 1; s <= 5; ++s) CHECK(stars[s] == 12);
  CHECK(std::is_sorted(fx.gold.begin(), fx.gold.end(),
                       [](const auto& a, const auto& b) { return a.sentence_id < b.sentence_id; }));
  std::size_t short_ones = 0;
  for (const auto& g : fx.gold) {
    CHECK_NOTHROW(validate_gold_record(g));
    short_ones += g.length_tokens <= 4;
  }
  CHECK(short_ones > 50);
  for (Topic t : kScoredTopics) CHECK(fixture_seed_keywords(t).size() == 5);
}

TEST_CASE("fixture is deterministic per seed") {
  testing::TempDir dir;
  write_fixture(generate_fixture({}, {}), dir / "a");
  write_fixture(generate_fixture({}, {}), dir / "b");
  for (const char* f : {"reviews.jsonl", "annotations.jsonl", "gold.jsonl", "taxonomy.json", "ngrams.json"})
    CHECK(testing::read_text(dir / "a" / f) == testing::read_text(dir / "b" / f));
  FixtureOptions other;
  other.seed = 8;
  write_fixture(generate_fixture(other, {}), dir / "c");
  CHECK(testing::read_text(dir / "a" / "reviews.jsonl") != testing::read_text(dir / "c" / "reviews.jsonl"));
}

TEST_CASE("fixture through the store reproduces its gold standard") {
  testing::TempDir dir;
  const Fixture fx = generate_fixture({}, {});
  write_fixture(fx, dir / "fx");
  ProjectStore store = ProjectStore::create(dir / "p");
  CHECK(ingest_reviews(dir / "fx" / "reviews.jsonl", store).added == 60);
  CHECK(sample_balanced(store, 10).size() == 50);
  segment_store(store, {});
  const auto snap = store.snapshot();
  CHECK(snap->sentences().size() == 600);
  for (const Annotation& a : fx.annotations) record_annotation(a, store, {});
  const GoldExport g = export_gold(store, {});
  REQUIRE(g.records.size() == 600);
  for (std::size_t i = 0; i < 600; ++i) {
    CHECK(g.records[i].sentence_id == fx.gold[i].sentence_id);
    CHECK(g.records[i].topic == fx.gold[i].topic);
    CHECK(g.records[i].tokens == fx.gold[i].tokens);
  }
}
