#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include <set>

#include "qinu/corpus.hpp"

namespace qinu {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

bool is_ascii_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

std::pair<std::size_t, std::size_t> trim_range(const std::string& s, std::size_t begin,
                                               std::size_t end) {
  while (begin < end && is_ascii_space(s[begin])) ++begin;
  while (end > begin && is_ascii_space(s[end - 1])) --end;
  return {begin, end};
}

std::size_t whitespace_token_count(std::string_view s) {
  std::size_t n = 0;
  bool in_token = false;
  for (char c : s) {
    const bool space = is_ascii_space(c);
    if (!space && !in_token) ++n;
    in_token = !space;
  }
  return n;
}

std::string lower(std::string s) {
  for (char& c : s) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return s;
}

bool is_terminator(char c) { return c == '.' || c == '!' || c == '?'; }
bool is_closer(char c) { return c == '"' || c == '\'' || c == ')' || c == ']'; }

void check_span(const std::optional<TokenSpan>& span, std::size_t n_tokens, const char* name) {
  if (!span) return;
  if (span->start >= span->end || span->end > n_tokens)
    throw ValidationError(std::string(name) + " [" + std::to_string(span->start) + "," +
                          std::to_string(span->end) + ") is out of token range (sentence has " +
                          std::to_string(n_tokens) + " tokens)");
}

void check_topic_keyword(Topic topic, const std::optional<TokenSpan>& keyword) {
  if (topic == Topic::Other && keyword)
    throw ValidationError("topic 'other' must not carry a keyword_span");
  if (topic != Topic::Other && !keyword)
    throw ValidationError("topic '" + std::string(to_string(topic)) + "' requires a keyword_span");
}

}  // namespace

IngestResult ingest_reviews(const fs::path& path, ProjectStore& store, bool strict) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read review file '" + path.string() + "'");
  IngestResult result;
  std::vector<Review> valid;
  std::set<std::string> seen;
  const auto snap = store.snapshot();
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      Review r = json::parse(line).get<Review>();
      r.validate();
      if (snap->find_review(r.review_id) || !seen.insert(r.review_id).second) {
        ++result.duplicates;
        continue;
      }
      valid.push_back(std::move(r));
    } catch (const std::exception& e) {
      const std::string msg = e.what();
      if (strict)
        throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": " + msg);
      result.warnings.push_back({lineno, msg});
    }
  }
  result.added = store.append_reviews(valid);
  return result;
}

std::vector<std::string> sample_balanced(ProjectStore& store, int per_star) {
  if (per_star < 1) throw ValidationError("per_star must be >= 1");
  const auto snap = store.snapshot();
  if (snap->reviews().empty()) throw ValidationError("store has no reviews to sample");
  std::vector<std::string> selected;
  for (int star = 1; star <= 5; ++star) {
    std::vector<const Review*> pool;
    for (const Review& r : snap->reviews()) {
      if (r.stars == star) pool.push_back(&r);
    }
    std::sort(pool.begin(), pool.end(), [](const Review* a, const Review* b) {
      if (a->helpfulness_votes != b->helpfulness_votes)
        return a->helpfulness_votes > b->helpfulness_votes;
      return a->review_id < b->review_id;
    });
    const std::size_t take = std::min<std::size_t>(pool.size(), static_cast<std::size_t>(per_star));
    for (std::size_t i = 0; i < take; ++i) selected.push_back(pool[i]->review_id);
  }
  store.set_selection(selected);
  return selected;
}

void SegmentationConfig::validate() const {
  if (max_tokens < 1) throw ValidationError("segmentation.max_tokens must be >= 1");
}

std::string sentence_id_for(const std::string& review_id, std::size_t ordinal) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "-s%03zu", ordinal);
  return review_id + buf;
}

std::vector<Sentence> segment_review(const Review& review, const SegmentationConfig& rules) {
  const std::string& body = review.body;
  std::set<std::string> abbreviations;
  for (const std::string& a : rules.abbreviations) abbreviations.insert(lower(a));

  std::vector<std::size_t> boundaries;  // exclusive end of each fragment
  std::size_t i = 0;
  while (i < body.size()) {
    if (!is_terminator(body[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < body.size() && is_terminator(body[j])) ++j;
    while (j < body.size() && is_closer(body[j])) ++j;
    if (j < body.size() && !is_ascii_space(body[j])) {
      i = j;
      continue;
    }
    bool abbreviation = false;
    if (j == i + 1 && body[i] == '.') {
      std::size_t w = i;
      while (w > 0 && !is_ascii_space(body[w - 1])) --w;
      abbreviation = abbreviations.contains(lower(body.substr(w, i + 1 - w)));
    }
    if (!abbreviation) boundaries.push_back(j);
    i = j;
  }
  if (boundaries.empty() || boundaries.back() != body.size()) boundaries.push_back(body.size());

  std::vector<Sentence> out;
  std::size_t start = 0;
  for (std::size_t end : boundaries) {
    auto [b, e] = trim_range(body, start, end);
    start = end;
    if (b == e) continue;
    Sentence s;
    s.review_id = review.review_id;
    s.ordinal = out.size();
    s.sentence_id = sentence_id_for(review.review_id, s.ordinal);
    s.span_start = b;
    s.span_end = e;
    s.text = body.substr(b, e - b);
    s.origin = SentenceOrigin::Auto;
    s.needs_review = whitespace_token_count(s.text) > rules.max_tokens;
    out.push_back(std::move(s));
  }
  return out;
}

SegmentResult segment_store(ProjectStore& store, const SegmentationConfig& rules) {
  rules.validate();
  const auto snap = store.snapshot();
  std::vector<const Review*> targets;
  if (snap->selection().empty()) {
    for (const Review& r : snap->reviews()) targets.push_back(&r);
  } else {
    for (const std::string& id : snap->selection()) {
      if (const Review* r = snap->find_review(id)) targets.push_back(r);
    }
  }
  SegmentResult result;
  std::vector<Sentence> fresh;
  for (const Review* r : targets) {
    if (!snap->sentences_of(r->review_id).empty()) continue;
    auto sentences = segment_review(*r, rules);
    ++result.reviews_segmented;
    for (const Sentence& s : sentences) result.flagged += s.needs_review ? 1 : 0;
    fresh.insert(fresh.end(), sentences.begin(), sentences.end());
  }
  result.sentences_added = fresh.size();
  store.append_sentences(fresh);
  return result;
}

std::pair<Sentence, Sentence> split_sentence(ProjectStore& store, const std::string& sentence_id,
                                             std::size_t char_offset, std::size_t max_tokens) {
  const auto snap = store.snapshot();
  const Sentence* s = snap->find_sentence(sentence_id);
  if (!s) throw NotFoundError("unknown sentence " + sentence_id);
  if (snap->is_annotated(sentence_id))
    throw ConflictError("sentence " + sentence_id + " is already annotated");
  const Review* review = snap->find_review(s->review_id);
  if (!review) throw NotFoundError("sentence " + sentence_id + " references a missing review");
  if (char_offset <= s->span_start || char_offset >= s->span_end)
    throw ValidationError("split offset " + std::to_string(char_offset) +
                          " must lie strictly inside the sentence span [" +
                          std::to_string(s->span_start) + "," + std::to_string(s->span_end) + ")");
  const std::string& body = review->body;
  if ((static_cast<unsigned char>(body[char_offset]) & 0xC0) == 0x80)
    throw ValidationError("split offset falls inside a multi-byte character");
  auto [b1, e1] = trim_range(body, s->span_start, char_offset);
  auto [b2, e2] = trim_range(body, char_offset, s->span_end);
  if (b1 == e1 || b2 == e2) throw ValidationError("both halves of a split must be non-empty");

  auto half = [&](std::size_t b, std::size_t e, const char* suffix) {
    Sentence h;
    h.sentence_id = sentence_id + suffix;
    h.review_id = s->review_id;
    h.span_start = b;
    h.span_end = e;
    h.text = body.substr(b, e - b);
    h.origin = SentenceOrigin::ManualSplit;
    h.needs_review = whitespace_token_count(h.text) > max_tokens;
    return h;
  };
  Sentence first = half(b1, e1, "a");
  Sentence second = half(b2, e2, "b");
  if (snap->find_sentence(first.sentence_id) || snap->find_sentence(second.sentence_id))
    throw ConflictError("split ids for " + sentence_id + " already exist");
  store.replace_sentence(sentence_id, first, second);
  first.ordinal = s->ordinal;
  second.ordinal = s->ordinal + 1;
  return {first, second};
}

std::string utc_timestamp_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Annotation record_annotation(Annotation a, ProjectStore& store, const PipelineConfig& pipeline) {
  const auto snap = store.snapshot();
  const Sentence* s = snap->find_sentence(a.sentence_id);
  if (!s) throw NotFoundError("unknown sentence_id " + a.sentence_id);
  if (a.annotator_id.empty()) throw ValidationError("annotator_id must be non-empty");
  check_topic_keyword(a.topic, a.keyword_span);
  const std::size_t n = tokenize(s->text, pipeline).size();
  check_span(a.keyword_span, n, "keyword_span");
  check_span(a.opinion_span, n, "opinion_span");
  check_span(a.modifier_span, n, "modifier_span");
  if (a.timestamp.empty()) a.timestamp = utc_timestamp_now();
  store.append_annotation(a);
  return a;
}

void validate_gold_record(const GoldRecord& r) {
  check_topic_keyword(r.topic, r.keyword_span);
  check_span(r.keyword_span, r.tokens.size(), "keyword_span");
  check_span(r.opinion_span, r.tokens.size(), "opinion_span");
  check_span(r.modifier_span, r.tokens.size(), "modifier_span");
}

GoldExport export_gold(const ProjectStore& store, const PipelineConfig& pipeline) {
  const auto snap = store.snapshot();
  if (snap->annotations().empty()) throw ValidationError("no annotations to export");

  // Latest record per (sentence, annotator); later file position wins ties.
  std::map<std::string, std::map<std::string, const Annotation*>> latest;
  for (const Annotation& a : snap->annotations()) {
    const Annotation*& slot = latest[a.sentence_id][a.annotator_id];
    if (!slot || a.timestamp >= slot->timestamp) slot = &a;
  }

  GoldExport out;
  for (const auto& [sentence_id, by_annotator] : latest) {
    const Sentence* s = snap->find_sentence(sentence_id);
    if (!s) {
      out.warnings.push_back("annotation for missing sentence " + sentence_id + " skipped");
      continue;
    }
    std::array<std::size_t, kTopicCount> votes{};
    for (const auto& [annotator, a] : by_annotator) ++votes[index_of(a->topic)];
    const std::size_t best = *std::max_element(votes.begin(), votes.end());
    if (std::count(votes.begin(), votes.end(), best) > 1) {
      ++out.dropped_conflicts;
      out.warnings.push_back("sentence " + sentence_id + " dropped: annotators tie on topic");
      continue;
    }
    // Representative: lexicographically first annotator voting for the majority topic.
    const Annotation* chosen = nullptr;
    for (const auto& [annotator, a] : by_annotator) {
      if (votes[index_of(a->topic)] == best) {
        chosen = a;
        break;
      }
    }
    GoldRecord r;
    r.sentence_id = sentence_id;
    r.review_id = s->review_id;
    if (const Review* review = snap->find_review(s->review_id)) r.product_id = review->product_id;
    r.text = s->text;
    r.tokens = tokenize(s->text, pipeline);
    r.length_tokens = count_length_tokens(s->text, pipeline);
    r.topic = chosen->topic;
    r.polarity = chosen->polarity;
    r.keyword_span = chosen->keyword_span;
    r.opinion_span = chosen->opinion_span;
    r.modifier_span = chosen->modifier_span;
    try {
      validate_gold_record(r);
    } catch (const ValidationError& e) {
      out.warnings.push_back("sentence " + sentence_id + " skipped: " + e.what());
      continue;
    }
    out.records.push_back(std::move(r));
  }
  return out;
}

}  // namespace qinu
