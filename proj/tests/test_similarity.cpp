#include <doctest.h>

#include <cmath>
#include <random>

#include "qinu/fixture.hpp"
#include "qinu/similarity.hpp"
#include "test_support.hpp"

using namespace qinu;

namespace {

// A(1) -> B(2) -> {C(3): fast, D(3): quick}; E(1): crash
std::shared_ptr<const Taxonomy> five_nodes() {
  return std::make_shared<const Taxonomy>(Taxonomy::from_synsets({
      {"A", {"thing"}, std::nullopt},
      {"B", {"speed"}, "A"},
      {"C", {"fast"}, "B"},
      {"D", {"quick", "rapid"}, "B"},
      {"E", {"crash"}, std::nullopt},
  }));
}

// Direct transcription of the sentence formula, independent of the cached scorer.
double oracle_sentence(const Tokens& s1, const Tokens& s2, const Taxonomy& tax, double delta = 0.85,
                       double threshold = 0.4) {
  std::vector<std::string> joint;
  for (const Tokens* s : {&s1, &s2})
    for (const auto& w : *s)
      if (std::find(joint.begin(), joint.end(), w) == joint.end()) joint.push_back(w);
  auto vectors = [&](const Tokens& s, std::vector<double>& v, std::vector<double>& r) {
    for (const auto& w : joint) {
      double best = 0.0;
      std::size_t pos = 0;
      for (std::size_t i = 0; i < s.size(); ++i) {
        const double x = word_similarity_taxonomy(w, s[i], tax);
        if (x > best) {
          best = x;
          pos = i + 1;
        }
      }
      v.push_back(best);
      r.push_back(best > threshold ? static_cast<double>(pos) : 0.0);
    }
  };
  std::vector<double> v1, v2, r1, r2;
  vectors(s1, v1, r1);
  vectors(s2, v2, r2);
  double dot = 0, n1 = 0, n2 = 0, diff = 0, sum = 0;
  for (std::size_t i = 0; i < joint.size(); ++i) {
    dot += v1[i] * v2[i];
    n1 += v1[i] * v1[i];
    n2 += v2[i] * v2[i];
    diff += (r1[i] - r2[i]) * (r1[i] - r2[i]);
    sum += (r1[i] + r2[i]) * (r1[i] + r2[i]);
  }
  const double ss = (n1 == 0 || n2 == 0) ? 0.0 : dot / std::sqrt(n1 * n2);
  const double so = (diff == 0) ? 1.0 : 1.0 - std::sqrt(diff) / std::sqrt(sum);
  return delta * ss + (1 - delta) * so;
}

}  // namespace

TEST_CASE("taxonomy word similarity") {
  const auto tax = five_nodes();
  CHECK(word_similarity_taxonomy("fast", "fast", *tax) == 1.0);
  CHECK(word_similarity_taxonomy("Fast", "FAST", *tax) == 1.0);
  CHECK(word_similarity_taxonomy("fast", "not_in_taxonomy", *tax) == 0.0);
  // siblings under B: l = 2, h = depth(B) = 2
  const double expected = std::exp(-0.4) * std::tanh(0.9);
  CHECK(word_similarity_taxonomy("fast", "quick", *tax) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(expected == doctest::Approx(0.4801).epsilon(1e-4));
  // only the virtual root in common
  CHECK(word_similarity_taxonomy("fast", "crash", *tax) == 0.0);
  // parent/child: l = 1, ancestor B at depth 2
  CHECK(word_similarity_taxonomy("fast", "speed", *tax) ==
        doctest::Approx(std::exp(-0.2) * std::tanh(0.9)).epsilon(1e-12));
  // members of one synset: l = 0, h = depth 3
  CHECK(word_similarity_taxonomy("quick", "rapid", *tax) == doctest::Approx(std::tanh(1.35)).epsilon(1e-12));
}

TEST_CASE("deeper common ancestors never lower the score") {
  // Two chains with identical path length 2 but different ancestor depths.
  std::vector<Taxonomy::Synset> syn = {{"r", {"r"}, std::nullopt}};
  std::string parent = "r";
  for (int d = 0; d < 6; ++d) {
    const std::string id = "n" + std::to_string(d);
    syn.push_back({id, {id}, parent});
    syn.push_back({id + "x", {"x" + std::to_string(d)}, id});
    syn.push_back({id + "y", {"y" + std::to_string(d)}, id});
    parent = id;
  }
  const Taxonomy tax = Taxonomy::from_synsets(syn);
  double prev = 0.0;
  for (int d = 0; d < 6; ++d) {
    const double s = word_similarity_taxonomy("x" + std::to_string(d), "y" + std::to_string(d), tax);
    CHECK(s >= prev);
    prev = s;
  }
}

TEST_CASE("taxonomy validation and round trip") {
  CHECK_THROWS_AS(Taxonomy::from_synsets({{"a", {"x"}, "b"}, {"b", {"y"}, "a"}}), ValidationError);
  CHECK_THROWS_AS(Taxonomy::from_synsets({{"a", {"x"}, "zz"}}), ValidationError);
  CHECK_THROWS_AS(Taxonomy::from_synsets({{"a", {"x"}, std::nullopt}, {"a", {"y"}, std::nullopt}}), ValidationError);
  CHECK_THROWS_AS(Taxonomy::from_synsets({{"a", {}, std::nullopt}}), ValidationError);
  CHECK_THROWS_AS(Taxonomy::from_json(nlohmann::json::array()), ValidationError);

  const auto tax = five_nodes();
  const Taxonomy again = Taxonomy::from_json(tax->to_json());
  CHECK(again.to_json() == tax->to_json());
  CHECK(word_similarity_taxonomy("fast", "quick", again) == word_similarity_taxonomy("fast", "quick", *tax));

  testing::TempDir dir;
  testing::write_text(dir / "t.json", tax->to_json().dump());
  CHECK(Taxonomy::load((dir / "t.json").string()).synset_count() == 5);
  CHECK_THROWS_AS(Taxonomy::load((dir / "none.json").string()), IoError);
}

TEST_CASE("n-gram relatedness") {
  const NgramTable table = NgramTable::from_counts(
      {{"slow", 10}, {"load", 8}, {"to", 20}, {"very", 5}, {"fast", 3}},
      {{{"slow", "to", "load"}, 4}, {{"load", "very", "slow"}, 2}});
  CHECK(word_relatedness_ngram("load", "load", table) == 1.0);
  CHECK(word_relatedness_ngram("slow", "load", table) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(word_relatedness_ngram("load", "slow", table) == word_relatedness_ngram("slow", "load", table));
  CHECK(word_relatedness_ngram("fast", "load", table) == 0.0);
  CHECK(word_relatedness_ngram("ghost", "load", table) == 0.0);
  // Both words must appear in the same trigram: only the first one has "to".
  CHECK(word_relatedness_ngram("to", "load", table) == doctest::Approx(4.0 / 20.0).epsilon(1e-12));

  const NgramTable again = NgramTable::from_json(table.to_json());
  CHECK(again.to_json() == table.to_json());
  CHECK(again.mean_cooccurrence("slow", "load") == 3.0);

  const NgramTable built = NgramTable::build({{"a", "b", "c", "d"}, {"a", "b", "c"}});
  CHECK(built.unigram("a") == 2);
  CHECK(built.trigram_count() == 2);
  CHECK(built.mean_cooccurrence("a", "c") == 2.0);
  CHECK_THROWS_AS(NgramTable::from_json(nlohmann::json{{"unigrams", {{"a", 0}}}, {"trigrams", nlohmann::json::array()}}),
                  ValidationError);
}

TEST_CASE("sentence similarity examples") {
  const auto tax = five_nodes();
  const SentenceSimParams p;
  CHECK(sentence_similarity({"fast", "crash"}, {"fast", "crash"}, p, tax) == 1.0);
  CHECK(sentence_similarity({"unknownword"}, {"unknownword"}, p, tax) == 1.0);
  // Two disjoint 2-token sentences: every joint word still matches itself in
  // its own sentence, so the order vectors are [1,2,0,0] and [0,0,1,2] and So = 0.
  CHECK(sentence_similarity({"w1", "w2"}, {"w3", "w4"}, p, tax) == 0.0);
  CHECK(oracle_sentence({"w1", "w2"}, {"w3", "w4"}, *tax) == 0.0);

  const double s = sentence_similarity({"fast", "app"}, {"quick", "app"}, p, tax);
  CHECK(s == doctest::Approx(oracle_sentence({"fast", "app"}, {"quick", "app"}, *tax)).epsilon(1e-12));
  CHECK(s > 0.0);
  CHECK(s < 1.0);

  CHECK_THROWS_AS(sentence_similarity({}, {"a"}, p, tax), ValidationError);
  SentenceSimParams ng = p;
  ng.backend = SimilarityBackend::Ngram;
  CHECK_THROWS_AS(sentence_similarity({"a"}, {"a"}, ng, tax), ValidationError);
  CHECK(parse_backend("ngram") == SimilarityBackend::Ngram);
  CHECK_THROWS_AS(parse_backend("wordnet"), ValidationError);
}

TEST_CASE("sentence similarity on fixture pairs: symmetry, bounds, oracle agreement") {
  const Fixture fx = generate_fixture({}, {});
  const auto tax = std::make_shared<const Taxonomy>(fx.taxonomy);
  const auto ngrams = std::make_shared<const NgramTable>(fx.ngrams);
  SentenceSimilarity cached({}, tax);
  SentenceSimParams np;
  np.backend = SimilarityBackend::Ngram;
  SentenceSimilarity cached_ng(np, ngrams);
  std::mt19937_64 rng(11);
  int checked = 0;
  while (checked < 50) {
    const Tokens& a = fx.gold[rng() % fx.gold.size()].tokens;
    const Tokens& b = fx.gold[rng() % fx.gold.size()].tokens;
    if (a.empty() || b.empty()) continue;
    ++checked;
    const double ab = sentence_similarity(a, b, {}, tax);
    const double ba = sentence_similarity(b, a, {}, tax);
    CHECK(std::abs(ab - ba) <= 1e-12);
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0 + 1e-12);
    CHECK(std::abs(ab - oracle_sentence(a, b, *tax)) <= 1e-12);
    CHECK(cached(a, b) == ab);
    CHECK(sentence_similarity(a, a, {}, tax) == 1.0);

    const double nab = cached_ng(a, b);
    CHECK(std::abs(nab - cached_ng(b, a)) <= 1e-12);
    CHECK(nab >= 0.0);
    CHECK(nab <= 1.0 + 1e-12);
    CHECK(cached_ng(a, a) == 1.0);
  }
}
