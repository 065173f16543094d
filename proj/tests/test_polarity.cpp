#include <doctest.h>

#include <random>

#include "qinu/polarity.hpp"

using namespace qinu;

namespace {

GoldRecord opinion(const std::string& id, Tokens tokens, Polarity p, TokenSpan op,
                   std::optional<TokenSpan> mod = std::nullopt) {
  GoldRecord r;
  r.sentence_id = id;
  r.topic = Topic::Efficiency;
  r.keyword_span = TokenSpan{0, 1};
  r.opinion_span = op;
  r.modifier_span = mod;
  r.polarity = p;
  r.length_tokens = tokens.size();
  r.tokens = std::move(tokens);
  return r;
}

ClassifiedSentence cs(Topic t, Polarity p) {
  ClassifiedSentence c;
  c.topic = t;
  c.polarity.label = p;
  c.polarity.score = p == Polarity::Positive ? 1.0 : p == Polarity::Negative ? -1.0 : 0.0;
  return c;
}

}  // namespace

TEST_CASE("lexicon induction") {
  SUBCASE("three positive votes give +1") {
    const LabeledDataset gold = {opinion("a", {"app", "fast"}, Polarity::Positive, {1, 2}),
                                 opinion("b", {"app", "fast"}, Polarity::Positive, {1, 2}),
                                 opinion("c", {"fast", "app"}, Polarity::Positive, {0, 1})};
    CHECK(build_lexicon(gold).lexicon.scores.at("fast") == 1.0);
  }
  SUBCASE("one vote each way cancels and is dropped") {
    const LabeledDataset gold = {opinion("a", {"app", "heavy"}, Polarity::Positive, {1, 2}),
                                 opinion("b", {"app", "heavy"}, Polarity::Negative, {1, 2}),
                                 opinion("c", {"app", "bad"}, Polarity::Negative, {1, 2})};
    const auto lex = build_lexicon(gold).lexicon;
    CHECK_FALSE(lex.scores.contains("heavy"));
    CHECK(lex.scores.at("bad") == -1.0);
  }
  SUBCASE("a negated modifier inverts the vote") {
    const LabeledDataset gold = {opinion("a", {"not", "bad"}, Polarity::Positive, {1, 2}, TokenSpan{0, 1})};
    CHECK(build_lexicon(gold).lexicon.scores.at("bad") == -1.0);
  }
  SUBCASE("unknown modifiers are reported and ignored") {
    const LabeledDataset gold = {opinion("a", {"kinda", "good"}, Polarity::Positive, {1, 2}, TokenSpan{0, 1}),
                                 opinion("b", {"very", "good"}, Polarity::Positive, {1, 2}, TokenSpan{0, 1})};
    const auto built = build_lexicon(gold);
    REQUIRE(built.warnings.size() == 1);
    CHECK(built.warnings[0].find("kinda") != std::string::npos);
    CHECK(built.lexicon.scores.at("good") == 1.0);
  }
  SUBCASE("no opinion spans is an error") {
    GoldRecord r = opinion("a", {"x"}, Polarity::Positive, {0, 1});
    r.opinion_span.reset();
    CHECK_THROWS_AS(build_lexicon({r}), ValidationError);
  }
  SUBCASE("JSON round trip and validation") {
    PolarityLexicon lex;
    lex.scores = {{"fast", 1.0}, {"slow", -0.5}};
    CHECK(lexicon_from_json(lexicon_to_json(lex)).scores == lex.scores);
    lex.scores["weird"] = 2.0;
    CHECK_THROWS_AS(lexicon_from_json(lexicon_to_json(lex)), ValidationError);
    CHECK_THROWS_AS(lexicon_from_json(nlohmann::json::object()), ValidationError);
  }
}

TEST_CASE("sentence polarity") {
  PolarityLexicon lex;
  lex.scores = {{"fast", 1.0}, {"good", 1.0}, {"slow", -1.0}};
  auto s = score_polarity({"this", "software", "is", "fast"}, lex);
  CHECK(s.score == 1.0);
  CHECK(s.label == Polarity::Positive);
  s = score_polarity({"not", "good"}, lex);
  CHECK(s.score == -1.0);
  CHECK(s.label == Polarity::Negative);
  s = score_polarity({"nothing", "here"}, lex);
  CHECK(s.score == 0.0);
  CHECK(s.label == Polarity::Neutral);
  CHECK(score_polarity({"very", "slow"}, lex).score == -1.5);
  CHECK(score_polarity({"never", "very", "slow"}, lex).score == 1.5);
  CHECK(score_polarity({"isn't", "good"}, lex).score == -1.0);
  // Negators more than three tokens back are out of the window.
  CHECK(score_polarity({"not", "a", "b", "c", "good"}, lex).score == 1.0);
  CHECK_THROWS_AS(score_polarity({"x"}, PolarityLexicon{}), ValidationError);
}

TEST_CASE("label agrees with the sign of the score (property)") {
  std::mt19937_64 rng(3);
  const std::vector<std::string> words = {"a", "b", "c", "d", "not", "very", "slightly", "never"};
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    PolarityLexicon lex;
    for (const char* w : {"a", "b", "c"}) {
      const double v = u(rng);
      if (v != 0.0) lex.scores[w] = v;
    }
    Tokens t;
    for (std::size_t i = 0, n = rng() % 8; i < n; ++i) t.push_back(words[rng() % words.size()]);
    const auto p = score_polarity(t, lex);
    CHECK((p.label == Polarity::Positive) == (p.score > 0));
    CHECK((p.label == Polarity::Negative) == (p.score < 0));
    CHECK((p.label == Polarity::Neutral) == (p.score == 0));
  }
}

TEST_CASE("characteristic scores") {
  std::vector<ClassifiedSentence> in = {cs(Topic::Efficiency, Polarity::Positive), cs(Topic::Efficiency, Polarity::Positive),
                                        cs(Topic::Efficiency, Polarity::Positive), cs(Topic::Efficiency, Polarity::Negative),
                                        cs(Topic::FreedomFromRisk, Polarity::Neutral), cs(Topic::Other, Polarity::Negative)};
  const auto out = characteristic_scores(in);
  REQUIRE(out.size() == 3);
  CHECK(out[index_of(Topic::Efficiency)].score == 0.75);
  CHECK_FALSE(out[index_of(Topic::FreedomFromRisk)].score.has_value());
  CHECK(out[index_of(Topic::FreedomFromRisk)].n_neutral == 1);
  CHECK_FALSE(out[index_of(Topic::Effectiveness)].score.has_value());
  for (const auto& c : characteristic_scores({})) CHECK_FALSE(c.score.has_value());
}

TEST_CASE("aggregate score") {
  auto chars = [](std::optional<double> a, std::optional<double> b, std::optional<double> c) {
    return std::vector<CharacteristicScore>{{Topic::Effectiveness, 0, 0, 0, a},
                                            {Topic::Efficiency, 0, 0, 0, b},
                                            {Topic::FreedomFromRisk, 0, 0, 0, c}};
  };
  CHECK(*qinu_score(chars(1.0, 0.5, 0.0), {}).aggregate == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(*qinu_score(chars(1.0, 1.0, 1.0), {0.7, 0.2, 0.1}).aggregate == doctest::Approx(1.0));
  // renormalized over the defined subset
  CHECK(*qinu_score(chars(1.0, std::nullopt, 0.0), {0.5, 0.3, 0.2}).aggregate ==
        doctest::Approx(0.5 / 0.7).epsilon(1e-12));
  CHECK_FALSE(qinu_score(chars(std::nullopt, std::nullopt, std::nullopt), {}).aggregate.has_value());
  CHECK_FALSE(qinu_score(chars(std::nullopt, 1.0, std::nullopt), {1.0, 0.0, 0.0}).aggregate.has_value());
  try {
    qinu_score(chars(1.0, 1.0, 1.0), {0.5, 0.5, 0.2});
    FAIL("expected an error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()) == "weights must sum to 1");
  }
}

TEST_CASE("monotonicity and bounds over random instances (property)") {
  std::mt19937_64 rng(17);
  const std::array<Topic, 4> topics = {Topic::Effectiveness, Topic::Efficiency, Topic::FreedomFromRisk, Topic::Other};
  const std::array<Polarity, 3> pols = {Polarity::Positive, Polarity::Negative, Polarity::Neutral};
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<ClassifiedSentence> in;
    for (std::size_t i = 0, n = 1 + rng() % 20; i < n; ++i) in.push_back(cs(topics[rng() % 4], pols[rng() % 3]));
    double a = u(rng), b = u(rng);
    if (a > b) std::swap(a, b);
    const QinUWeights w{a, b - a, 1.0 - b};
    const auto before_chars = characteristic_scores(in);
    const auto before = qinu_score(before_chars, w);
    if (before.aggregate) {
      double lo = 1, hi = 0;
      for (const auto& c : before_chars)
        if (c.score) lo = std::min(lo, *c.score), hi = std::max(hi, *c.score);
      CHECK(*before.aggregate >= lo - 1e-12);
      CHECK(*before.aggregate <= hi + 1e-12);
    }
    std::vector<std::size_t> negatives;
    for (std::size_t i = 0; i < in.size(); ++i)
      if (in[i].polarity.label == Polarity::Negative) negatives.push_back(i);
    if (negatives.empty()) continue;
    const std::size_t flip = negatives[rng() % negatives.size()];
    in[flip] = cs(in[flip].topic, Polarity::Positive);
    const auto after_chars = characteristic_scores(in);
    const auto after = qinu_score(after_chars, w);
    for (std::size_t c = 0; c < 3; ++c) {
      if (before_chars[c].score) CHECK(*after_chars[c].score >= *before_chars[c].score);
    }
    if (before.aggregate && after.aggregate) CHECK(*after.aggregate >= *before.aggregate - 1e-12);
  }
}

TEST_CASE("weights parsing and report rendering") {
  const QinUWeights w = parse_weights("0.4,0.3,0.3");
  CHECK(w.effectiveness == 0.4);
  CHECK(w.of(Topic::Other) == 0.0);
  CHECK_THROWS_AS(parse_weights("0.5,0.5,0.2"), ValidationError);
  CHECK_THROWS_AS(parse_weights("0.5,0.5"), UsageError);
  CHECK_THROWS_AS(parse_weights("a,b,c"), UsageError);
  CHECK_THROWS_AS(parse_weights("1.2,-0.1,-0.1"), ValidationError);

  QinUReport r = qinu_score(characteristic_scores({cs(Topic::Efficiency, Polarity::Positive)}), {});
  const auto j = report_to_json(r);
  CHECK(j["aggregate"] == 1.0);
  CHECK(j["characteristics"][0]["score"].is_null());
  CHECK(j["definitions"].size() == 5);
  CHECK(j["definitions"][3]["status"] == "not measured");
  const std::string text = render_report(r);
  CHECK(text.find("satisfaction: not measured") != std::string::npos);
  CHECK(text.find("undefined") != std::string::npos);
}
