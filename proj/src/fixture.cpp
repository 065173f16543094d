#include "qinu/fixture.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <stdexcept>

namespace qinu {

using nlohmann::json;

namespace {

struct Weighted {
  std::string word;
  unsigned weight;
};

const std::vector<Weighted>& topic_words(Topic t) {
  static const std::vector<Weighted> eff = {
      {"work", 12},     {"features", 10}, {"interface", 9}, {"simple", 8},   {"easy", 7},
      {"tool", 2},      {"functions", 2}, {"menu", 2},      {"options", 2},  {"tasks", 2},
      {"results", 2},   {"accurate", 2},  {"complete", 2},  {"export", 2},   {"reports", 2},
      {"layout", 2},    {"editing", 2},   {"workflow", 2},  {"documents", 2}};
  static const std::vector<Weighted> efc = {
      {"speed", 12},  {"stable", 10},  {"slow", 9},        {"load", 8},        {"memory", 7},
      {"fast", 2},    {"performance", 2}, {"startup", 2},  {"cpu", 2},         {"battery", 2},
      {"lag", 2},     {"responsive", 2},  {"quick", 2},    {"resources", 2},   {"seconds", 2},
      {"boot", 2},    {"ram", 2}};
  static const std::vector<Weighted> risk = {
      {"issue", 12},  {"trouble", 10}, {"error", 9},    {"freeze", 8},    {"fix", 7},
      {"crash", 2},   {"bug", 2},      {"virus", 2},    {"security", 2},  {"data", 2},
      {"loss", 2},    {"backup", 2},   {"safe", 2},     {"malware", 2},   {"corrupted", 2},
      {"privacy", 2}, {"firewall", 2}};
  static const std::vector<Weighted> other = {
      {"price", 3},    {"bought", 3},   {"gift", 2},   {"money", 1},     {"store", 1},    {"delivery", 1},
      {"brother", 1},  {"christmas", 1}, {"box", 1},   {"packaging", 1}, {"refund", 1},   {"seller", 1},
      {"shipping", 1}, {"cost", 1},     {"wife", 1},   {"birthday", 1},  {"coupon", 1},   {"retail", 1}};
  switch (t) {
    case Topic::Effectiveness:
      return eff;
    case Topic::Efficiency:
      return efc;
    case Topic::FreedomFromRisk:
      return risk;
    case Topic::Other:
      break;
  }
  return other;
}

const std::vector<std::string> kGeneric = {"software", "program", "app",    "version", "really",   "product",
                                           "computer", "windows", "install", "update", "thing",    "day",
                                           "week",     "new",     "month",  "today",   "user",     "people",
                                           "overall",  "still",   "now",    "after",   "using",    "laptop",
                                           "system",   "pc",      "home",   "office",  "everything"};
const std::vector<std::string> kStop = {"the", "this", "is", "it", "and", "was", "i",  "my",
                                        "with", "to",  "of", "for", "on", "in",  "so", "has"};
const std::vector<std::string> kPositive = {"great", "good",    "excellent", "love",      "nice",
                                            "awesome", "perfect", "happy",   "wonderful", "solid"};
const std::vector<std::string> kNegative = {"bad",      "terrible",     "awful",   "poor",  "horrible",
                                            "annoying", "disappointing", "useless", "worst", "frustrating"};
const std::vector<std::string> kIntensifiers = {"very", "extremely", "slightly"};
const std::vector<std::string> kNegators = {"not", "never", "no", "without"};

class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 0x71u};
    gen_.seed(seq);
  }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(gen_() % n); }
  double unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  bool chance(double p) { return unit() < p; }
  template <typename T>
  const T& pick(const std::vector<T>& v) { return v[below(v.size())]; }
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }
  const std::string& pick_weighted(const std::vector<Weighted>& v) {
    unsigned total = 0;
    for (const auto& w : v) total += w.weight;
    auto r = static_cast<unsigned>(below(total));
    for (const auto& w : v) {
      if (r < w.weight) return w.word;
      r -= w.weight;
    }
    return v.back().word;
  }

 private:
  std::mt19937_64 gen_;
};

struct Draft {
  std::string text;
  Topic topic = Topic::Other;
  Polarity polarity = Polarity::Neutral;
  std::optional<std::string> keyword, opinion, modifier;
};

std::size_t draw_length(Rng& rng, std::size_t bucket) {
  static const std::size_t lo[] = {2, 5, 8, 13};
  static const std::size_t hi[] = {4, 7, 12, 18};
  return lo[bucket] + rng.below(hi[bucket] - lo[bucket] + 1);
}

Draft make_sentence(Rng& rng, Topic topic, std::size_t length, Polarity polarity, bool ambiguous) {
  Draft d;
  d.topic = topic;
  d.polarity = polarity;
  std::vector<std::vector<std::string>> units;
  std::vector<std::string> used;
  if (ambiguous) {
    const std::string& w = rng.pick(kGeneric);
    units.push_back({w});
    used.push_back(w);
    if (topic != Topic::Other) d.keyword = w;
  } else {
    const std::string& w = rng.pick_weighted(topic_words(topic));
    units.push_back({w});
    used.push_back(w);
    if (topic != Topic::Other) d.keyword = w;
  }
  if (polarity != Polarity::Neutral) {
    // Modifiers need room for keyword + modifier + opinion.
    const bool negated = length >= 3 && rng.chance(0.2);
    const bool intensified = length >= 3 && !negated && rng.chance(0.25);
    const bool positive_word = (polarity == Polarity::Positive) != negated;
    d.opinion = rng.pick(positive_word ? kPositive : kNegative);
    if (negated) d.modifier = rng.pick(kNegators);
    if (intensified) d.modifier = rng.pick(kIntensifiers);
    std::vector<std::string> unit;
    if (d.modifier) unit.push_back(*d.modifier);
    unit.push_back(*d.opinion);
    units.push_back(std::move(unit));
  }
  std::size_t have = 0;
  for (const auto& u : units) have += u.size();
  std::size_t remaining = length > have ? length - have : 0;
  if (!ambiguous) {
    std::size_t extra = remaining * 2 / 5;
    const auto& vocab = topic_words(topic);
    for (std::size_t guard = 0; extra > 0 && guard < 100; ++guard) {
      const std::string& w = rng.pick(vocab).word;
      if (std::find(used.begin(), used.end(), w) != used.end()) continue;
      used.push_back(w);
      units.push_back({w});
      --extra;
      --remaining;
    }
  }
  for (; remaining > 0; --remaining) {
    if (rng.chance(0.5)) {
      units.push_back({rng.pick(kStop)});
    } else {
      // Keep the annotated keyword the first occurrence of its word.
      std::string w = rng.pick(kGeneric);
      while (d.keyword && w == *d.keyword) w = rng.pick(kGeneric);
      units.push_back({w});
    }
  }
  rng.shuffle(units);
  for (const auto& u : units) {
    for (const std::string& w : u) d.text += (d.text.empty() ? "" : " ") + w;
  }
  d.text[0] = static_cast<char>(d.text[0] - 'a' + 'A');
  d.text += rng.chance(0.2) ? "!" : ".";
  return d;
}

Polarity draw_polarity(Rng& rng, int stars) {
  static const double p_pos[] = {0.15, 0.3, 0.5, 0.7, 0.85};
  if (rng.chance(0.15)) return Polarity::Neutral;
  return rng.chance(p_pos[stars - 1]) ? Polarity::Positive : Polarity::Negative;
}

std::optional<TokenSpan> span_of(const Tokens& tokens, const std::optional<std::string>& word) {
  if (!word) return std::nullopt;
  auto it = std::find(tokens.begin(), tokens.end(), *word);
  if (it == tokens.end()) throw std::logic_error("fixture: word '" + *word + "' missing from its sentence");
  const auto i = static_cast<std::size_t>(it - tokens.begin());
  return TokenSpan{i, i + 1};
}

Taxonomy build_taxonomy() {
  std::vector<Taxonomy::Synset> synsets;
  synsets.push_back({"entity", {"entity"}, std::nullopt});
  auto add_category = [&](const std::string& id, const std::vector<std::string>& words) {
    synsets.push_back({id, {id}, std::string("entity")});
    for (const std::string& w : words) synsets.push_back({"w." + w, {w}, id});
  };
  for (Topic t : kAllTopics) {
    std::vector<std::string> words;
    for (const auto& w : topic_words(t)) words.push_back(w.word);
    add_category("category." + std::string(to_string(t)), words);
  }
  add_category("category.general", kGeneric);
  add_category("category.positive", kPositive);
  add_category("category.negative", kNegative);
  std::vector<std::string> modifiers = kIntensifiers;
  modifiers.insert(modifiers.end(), kNegators.begin(), kNegators.end());
  add_category("category.modifier", modifiers);
  return Taxonomy::from_synsets(std::move(synsets));
}

}  // namespace

const std::vector<std::string>& fixture_seed_keywords(Topic t) {
  static const std::vector<std::string> eff = {"work", "features", "interface", "simple", "easy"};
  static const std::vector<std::string> efc = {"speed", "stable", "slow", "load", "memory"};
  static const std::vector<std::string> risk = {"issue", "trouble", "error", "freeze", "fix"};
  static const std::vector<std::string> none;
  switch (t) {
    case Topic::Effectiveness:
      return eff;
    case Topic::Efficiency:
      return efc;
    case Topic::FreedomFromRisk:
      return risk;
    case Topic::Other:
      break;
  }
  return none;
}

Fixture generate_fixture(const FixtureOptions& o, const PipelineConfig& pipeline) {
  if (o.products == 0 || o.reviews_per_star == 0 || o.sentences_per_review == 0 ||
      o.annotated_per_star > o.reviews_per_star)
    throw ValidationError("fixture: invalid options");
  Rng rng(o.seed);

  // Label and length plans for the annotated sentences, in a fixed ratio.
  const std::size_t n_gold = 5 * o.annotated_per_star * o.sentences_per_review;
  std::vector<Topic> topics;
  const std::size_t n_other = n_gold / 6;
  const std::size_t n_risk = (n_gold - n_other) * 16 / 50;
  const std::size_t n_eff = (n_gold - n_other - n_risk) / 2;
  const std::size_t n_efc = n_gold - n_other - n_risk - n_eff;
  topics.insert(topics.end(), n_eff, Topic::Effectiveness);
  topics.insert(topics.end(), n_efc, Topic::Efficiency);
  topics.insert(topics.end(), n_risk, Topic::FreedomFromRisk);
  topics.insert(topics.end(), n_other, Topic::Other);
  rng.shuffle(topics);
  std::vector<std::size_t> buckets;
  const std::size_t b0 = n_gold * 15 / 100, b1 = n_gold * 20 / 100, b2 = n_gold * 35 / 100;
  buckets.insert(buckets.end(), b0, 0);
  buckets.insert(buckets.end(), b1, 1);
  buckets.insert(buckets.end(), b2, 2);
  buckets.insert(buckets.end(), n_gold - b0 - b1 - b2, 3);
  rng.shuffle(buckets);

  Fixture f;
  std::size_t gold_cursor = 0;
  SegmentationConfig seg;
  std::size_t review_no = 0;
  for (int stars = 1; stars <= 5; ++stars) {
    for (std::size_t r = 0; r < o.reviews_per_star; ++r, ++review_no) {
      const bool annotated = r < o.annotated_per_star;
      Review rev;
      char id[32];
      std::snprintf(id, sizeof id, "r%03zu", review_no + 1);
      rev.review_id = id;
      rev.source = "fixture";
      rev.product_id = "product-" + std::string(1, static_cast<char>('a' + review_no % o.products));
      rev.stars = stars;
      rev.title = std::to_string(stars) + " star review";
      char date[16];
      std::snprintf(date, sizeof date, "2023-%02zu-%02zu", 1 + review_no % 12, 1 + review_no % 28);
      rev.date = date;
      rev.helpfulness_votes = annotated ? static_cast<long long>(100 + 10 * (o.reviews_per_star - r))
                                        : static_cast<long long>(r - o.annotated_per_star);
      std::vector<Draft> drafts;
      const std::size_t count = annotated ? o.sentences_per_review : o.unannotated_sentences;
      for (std::size_t s = 0; s < count; ++s) {
        Topic topic;
        std::size_t bucket;
        if (annotated) {
          topic = topics[gold_cursor];
          bucket = buckets[gold_cursor];
          ++gold_cursor;
        } else {
          topic = kAllTopics[rng.below(kTopicCount)];
          bucket = rng.below(4);
        }
        const std::size_t length = draw_length(rng, bucket);
        const bool ambiguous = bucket == 0 && rng.chance(0.5);
        drafts.push_back(make_sentence(rng, topic, length, draw_polarity(rng, stars), ambiguous));
      }
      for (const Draft& d : drafts) rev.body += (rev.body.empty() ? "" : " ") + d.text;
      rev.validate();

      const auto sentences = segment_review(rev, seg);
      if (sentences.size() != drafts.size()) throw std::logic_error("fixture: segmentation mismatch in " + rev.review_id);
      for (std::size_t s = 0; s < drafts.size(); ++s) {
        if (sentences[s].text != drafts[s].text)
          throw std::logic_error("fixture: segmented text differs in " + sentences[s].sentence_id);
        f.sentences.push_back(sentences[s]);
        if (!annotated) continue;
        const Draft& d = drafts[s];
        GoldRecord g;
        g.sentence_id = sentences[s].sentence_id;
        g.review_id = rev.review_id;
        g.product_id = rev.product_id;
        g.text = d.text;
        g.tokens = tokenize(d.text, pipeline);
        g.length_tokens = count_length_tokens(d.text, pipeline);
        g.topic = d.topic;
        g.polarity = d.polarity;
        g.keyword_span = span_of(g.tokens, d.keyword);
        g.opinion_span = span_of(g.tokens, d.opinion);
        g.modifier_span = span_of(g.tokens, d.modifier);
        validate_gold_record(g);
        Annotation a;
        a.sentence_id = g.sentence_id;
        a.topic = g.topic;
        a.keyword_span = g.keyword_span;
        a.opinion_span = g.opinion_span;
        a.modifier_span = g.modifier_span;
        a.polarity = g.polarity;
        a.annotator_id = o.annotator_id;
        a.timestamp = "2024-01-01T00:00:00Z";
        f.annotations.push_back(std::move(a));
        f.gold.push_back(std::move(g));
      }
      f.reviews.push_back(std::move(rev));
    }
  }
  std::sort(f.gold.begin(), f.gold.end(),
            [](const GoldRecord& a, const GoldRecord& b) { return a.sentence_id < b.sentence_id; });
  f.taxonomy = build_taxonomy();
  std::vector<Tokens> docs;
  for (const Sentence& s : f.sentences) docs.push_back(tokenize(s.text, pipeline));
  f.ngrams = NgramTable::build(docs);
  return f;
}

void write_fixture(const Fixture& f, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  auto write_lines = [&](const char* name, const auto& items) {
    std::ofstream out(dir / name, std::ios::trunc | std::ios::binary);
    if (!out) throw IoError("cannot write " + (dir / name).string());
    for (const auto& item : items) out << json(item).dump() << "\n";
  };
  write_lines("reviews.jsonl", f.reviews);
  write_lines("annotations.jsonl", f.annotations);
  write_lines("gold.jsonl", f.gold);
  auto write_json = [&](const char* name, const json& j) {
    std::ofstream out(dir / name, std::ios::trunc | std::ios::binary);
    if (!out) throw IoError("cannot write " + (dir / name).string());
    out << j.dump(1) << "\n";
  };
  write_json("taxonomy.json", f.taxonomy.to_json());
  write_json("ngrams.json", f.ngrams.to_json());
}

}  // namespace qinu
