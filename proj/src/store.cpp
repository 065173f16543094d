#include <fcntl.h>
#include <signal.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <fstream>
#include <mutex>
#include <sstream>

#include "qinu/corpus.hpp"

namespace qinu {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <typename T>
T get_field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw ValidationError(std::string("missing field '") + key + "'");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ValidationError(std::string("field '") + key + "' has the wrong type");
  }
}

template <typename T>
T get_optional(const json& j, const char* key, T fallback) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ValidationError(std::string("field '") + key + "' has the wrong type");
  }
}

bool is_blank(const std::string& s) {
  return s.find_first_not_of(" \t\r\n\v\f") == std::string::npos;
}

template <typename T>
std::vector<T> read_jsonl(const fs::path& path) {
  std::vector<T> out;
  std::ifstream in(path);
  if (!in) return out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (is_blank(line)) continue;
    try {
      out.push_back(json::parse(line).get<T>());
    } catch (const std::exception& e) {
      throw IoError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

void append_lines(const fs::path& path, const std::vector<json>& records) {
  std::ofstream out(path, std::ios::app | std::ios::binary);
  if (!out) throw IoError("cannot append to '" + path.string() + "'");
  for (const json& r : records) out << r.dump() << '\n';
  out.flush();
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

void write_atomically(const fs::path& path, const std::string& contents) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc | std::ios::binary);
    if (!out) throw IoError("cannot write '" + tmp.string() + "'");
    out << contents;
    out.flush();
    if (!out) throw IoError("write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, path);
}

}  // namespace

// ---------------------------------------------------------------------------
// JSON records

json span_to_json(const std::optional<TokenSpan>& span) {
  if (!span) return nullptr;
  return json::array({span->start, span->end});
}

std::optional<TokenSpan> span_from_json(const json& j) {
  if (j.is_null()) return std::nullopt;
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_unsigned() || !j[1].is_number_unsigned())
    throw ValidationError("spans must be [start_token, end_token) pairs of non-negative integers");
  return TokenSpan{j[0].get<std::size_t>(), j[1].get<std::size_t>()};
}

void Review::validate() const {
  if (review_id.empty()) throw ValidationError("review_id must be non-empty");
  if (stars < 1 || stars > 5)
    throw ValidationError("stars must be in 1..5 (got " + std::to_string(stars) + ")");
  if (is_blank(body)) throw ValidationError("review body must be non-empty");
  if (helpfulness_votes < 0) throw ValidationError("helpfulness_votes must be non-negative");
}

void to_json(json& j, const Review& r) {
  j = json{{"review_id", r.review_id}, {"source", r.source},
           {"product_id", r.product_id}, {"stars", r.stars},
           {"title", r.title},           {"body", r.body},
           {"date", r.date ? json(*r.date) : json(nullptr)},
           {"helpfulness_votes", r.helpfulness_votes}};
}

void from_json(const json& j, Review& r) {
  if (!j.is_object()) throw ValidationError("review record must be a JSON object");
  r.review_id = get_field<std::string>(j, "review_id");
  r.source = get_optional<std::string>(j, "source", "");
  r.product_id = get_optional<std::string>(j, "product_id", "");
  r.stars = get_field<int>(j, "stars");
  r.title = get_optional<std::string>(j, "title", "");
  r.body = get_field<std::string>(j, "body");
  auto date = j.find("date");
  if (date != j.end() && !date->is_null()) {
    if (!date->is_string()) throw ValidationError("field 'date' has the wrong type");
    r.date = date->get<std::string>();
  } else {
    r.date.reset();
  }
  r.helpfulness_votes = get_optional<long long>(j, "helpfulness_votes", 0);
}

void to_json(json& j, const Sentence& s) {
  j = json{{"sentence_id", s.sentence_id},
           {"review_id", s.review_id},
           {"ordinal", s.ordinal},
           {"text", s.text},
           {"span_start", s.span_start},
           {"span_end", s.span_end},
           {"origin", s.origin == SentenceOrigin::Auto ? "auto" : "manual_split"},
           {"needs_review", s.needs_review}};
}

void from_json(const json& j, Sentence& s) {
  s.sentence_id = get_field<std::string>(j, "sentence_id");
  s.review_id = get_field<std::string>(j, "review_id");
  s.ordinal = get_field<std::size_t>(j, "ordinal");
  s.text = get_field<std::string>(j, "text");
  s.span_start = get_field<std::size_t>(j, "span_start");
  s.span_end = get_field<std::size_t>(j, "span_end");
  const auto origin = get_field<std::string>(j, "origin");
  if (origin == "auto") {
    s.origin = SentenceOrigin::Auto;
  } else if (origin == "manual_split") {
    s.origin = SentenceOrigin::ManualSplit;
  } else {
    throw ValidationError("unknown sentence origin '" + origin + "'");
  }
  s.needs_review = get_optional<bool>(j, "needs_review", false);
}

void to_json(json& j, const Annotation& a) {
  j = json{{"sentence_id", a.sentence_id},
           {"topic", to_string(a.topic)},
           {"keyword_span", span_to_json(a.keyword_span)},
           {"opinion_span", span_to_json(a.opinion_span)},
           {"modifier_span", span_to_json(a.modifier_span)},
           {"polarity", to_string(a.polarity)},
           {"annotator_id", a.annotator_id},
           {"timestamp", a.timestamp}};
}

void from_json(const json& j, Annotation& a) {
  if (!j.is_object()) throw ValidationError("annotation must be a JSON object");
  a.sentence_id = get_field<std::string>(j, "sentence_id");
  a.topic = parse_topic(get_field<std::string>(j, "topic"));
  auto span = [&](const char* key) {
    auto it = j.find(key);
    return it == j.end() ? std::nullopt : span_from_json(*it);
  };
  a.keyword_span = span("keyword_span");
  a.opinion_span = span("opinion_span");
  a.modifier_span = span("modifier_span");
  a.polarity = parse_polarity(get_field<std::string>(j, "polarity"));
  a.annotator_id = get_optional<std::string>(j, "annotator_id", "");
  a.timestamp = get_optional<std::string>(j, "timestamp", "");
}

void to_json(json& j, const GoldRecord& r) {
  j = json{{"sentence_id", r.sentence_id},
           {"review_id", r.review_id},
           {"product_id", r.product_id},
           {"text", r.text},
           {"tokens", r.tokens},
           {"length_tokens", r.length_tokens},
           {"topic", to_string(r.topic)},
           {"polarity", to_string(r.polarity)},
           {"keyword_span", span_to_json(r.keyword_span)},
           {"opinion_span", span_to_json(r.opinion_span)},
           {"modifier_span", span_to_json(r.modifier_span)}};
}

void from_json(const json& j, GoldRecord& r) {
  r.sentence_id = get_field<std::string>(j, "sentence_id");
  r.review_id = get_optional<std::string>(j, "review_id", "");
  r.product_id = get_optional<std::string>(j, "product_id", "");
  r.text = get_field<std::string>(j, "text");
  r.tokens = get_field<Tokens>(j, "tokens");
  r.length_tokens = get_optional<std::size_t>(j, "length_tokens", r.tokens.size());
  r.topic = parse_topic(get_field<std::string>(j, "topic"));
  r.polarity = parse_polarity(get_field<std::string>(j, "polarity"));
  r.keyword_span = span_from_json(j.value("keyword_span", json(nullptr)));
  r.opinion_span = span_from_json(j.value("opinion_span", json(nullptr)));
  r.modifier_span = span_from_json(j.value("modifier_span", json(nullptr)));
}

// ---------------------------------------------------------------------------
// Snapshot

void StoreSnapshot::reindex() {
  review_index_.clear();
  sentence_index_.clear();
  annotation_counts_.clear();
  for (std::size_t i = 0; i < reviews_.size(); ++i) review_index_.emplace(reviews_[i].review_id, i);
  for (std::size_t i = 0; i < sentences_.size(); ++i)
    sentence_index_.emplace(sentences_[i].sentence_id, i);
  for (const Annotation& a : annotations_) ++annotation_counts_[a.sentence_id];
}

const Review* StoreSnapshot::find_review(const std::string& id) const {
  auto it = review_index_.find(id);
  return it == review_index_.end() ? nullptr : &reviews_[it->second];
}

const Sentence* StoreSnapshot::find_sentence(const std::string& id) const {
  auto it = sentence_index_.find(id);
  return it == sentence_index_.end() ? nullptr : &sentences_[it->second];
}

std::vector<const Sentence*> StoreSnapshot::sentences_of(const std::string& review_id) const {
  std::vector<const Sentence*> out;
  for (const Sentence& s : sentences_) {
    if (s.review_id == review_id) out.push_back(&s);
  }
  std::sort(out.begin(), out.end(),
            [](const Sentence* a, const Sentence* b) { return a->ordinal < b->ordinal; });
  return out;
}

bool StoreSnapshot::is_annotated(const std::string& sentence_id) const {
  return annotation_counts_.contains(sentence_id);
}

std::size_t StoreSnapshot::annotated_sentence_count() const {
  std::size_t n = 0;
  for (const auto& [id, count] : annotation_counts_) {
    if (sentence_index_.contains(id)) ++n;
  }
  return n;
}

// ---------------------------------------------------------------------------
// Store

struct ProjectStore::Impl {
  fs::path root;
  std::mutex write_mutex;
  mutable std::mutex snapshot_mutex;
  std::shared_ptr<const StoreSnapshot> current;

  void publish(std::shared_ptr<StoreSnapshot> next) {
    next->reindex();
    std::lock_guard guard(snapshot_mutex);
    current = std::move(next);
  }

  std::shared_ptr<StoreSnapshot> copy_current() const {
    std::lock_guard guard(snapshot_mutex);
    return std::make_shared<StoreSnapshot>(*current);
  }
};

ProjectStore::ProjectStore(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}
ProjectStore::ProjectStore(ProjectStore&&) noexcept = default;
ProjectStore& ProjectStore::operator=(ProjectStore&&) noexcept = default;
ProjectStore::~ProjectStore() = default;

ProjectStore ProjectStore::create(const fs::path& root) {
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) throw IoError("cannot create project directory '" + root.string() + "': " + ec.message());
  for (const char* name : {kReviewsFile, kSentencesFile, kAnnotationsFile}) {
    const fs::path p = root / name;
    if (!fs::exists(p)) std::ofstream(p, std::ios::binary);
  }
  return open(root);
}

ProjectStore ProjectStore::open(const fs::path& root) {
  if (!fs::is_directory(root) || !fs::exists(root / kReviewsFile))
    throw NotFoundError("no project at '" + root.string() + "' (run `qinu init` first)");
  auto impl = std::make_unique<Impl>();
  impl->root = root;
  auto snap = std::make_shared<StoreSnapshot>();
  snap->reviews_ = read_jsonl<Review>(root / kReviewsFile);
  snap->sentences_ = read_jsonl<Sentence>(root / kSentencesFile);
  snap->annotations_ = read_jsonl<Annotation>(root / kAnnotationsFile);
  const fs::path sel = root / kSelectionFile;
  if (fs::exists(sel)) {
    std::ifstream in(sel);
    try {
      snap->selection_ = json::parse(in).get<std::vector<std::string>>();
    } catch (const std::exception& e) {
      throw IoError(sel.string() + ": " + e.what());
    }
  }
  impl->publish(std::move(snap));
  return ProjectStore(std::move(impl));
}

const fs::path& ProjectStore::root() const { return impl_->root; }

std::shared_ptr<const StoreSnapshot> ProjectStore::snapshot() const {
  std::lock_guard guard(impl_->snapshot_mutex);
  return impl_->current;
}

std::size_t ProjectStore::append_reviews(const std::vector<Review>& reviews) {
  std::lock_guard write(impl_->write_mutex);
  auto next = impl_->copy_current();
  std::vector<json> lines;
  for (const Review& r : reviews) {
    r.validate();
    if (next->review_index_.contains(r.review_id)) continue;
    next->review_index_.emplace(r.review_id, next->reviews_.size());
    next->reviews_.push_back(r);
    lines.emplace_back(r);
  }
  if (lines.empty()) return 0;
  append_lines(impl_->root / kReviewsFile, lines);
  impl_->publish(std::move(next));
  return lines.size();
}

void ProjectStore::set_selection(std::vector<std::string> review_ids) {
  std::lock_guard write(impl_->write_mutex);
  auto next = impl_->copy_current();
  write_atomically(impl_->root / kSelectionFile, json(review_ids).dump(1) + "\n");
  next->selection_ = std::move(review_ids);
  impl_->publish(std::move(next));
}

void ProjectStore::append_sentences(const std::vector<Sentence>& sentences) {
  std::lock_guard write(impl_->write_mutex);
  auto next = impl_->copy_current();
  std::vector<json> lines;
  for (const Sentence& s : sentences) {
    if (!next->review_index_.contains(s.review_id))
      throw ValidationError("sentence " + s.sentence_id + " references unknown review " +
                            s.review_id);
    if (next->sentence_index_.contains(s.sentence_id))
      throw ConflictError("duplicate sentence id " + s.sentence_id);
    next->sentence_index_.emplace(s.sentence_id, next->sentences_.size());
    next->sentences_.push_back(s);
    lines.emplace_back(s);
  }
  if (lines.empty()) return;
  append_lines(impl_->root / kSentencesFile, lines);
  impl_->publish(std::move(next));
}

void ProjectStore::replace_sentence(const std::string& sentence_id, const Sentence& first,
                                    const Sentence& second) {
  std::lock_guard write(impl_->write_mutex);
  auto next = impl_->copy_current();
  auto it = std::find_if(next->sentences_.begin(), next->sentences_.end(),
                         [&](const Sentence& s) { return s.sentence_id == sentence_id; });
  if (it == next->sentences_.end()) throw NotFoundError("unknown sentence " + sentence_id);
  if (next->annotation_counts_.contains(sentence_id))
    throw ConflictError("sentence " + sentence_id + " is already annotated");
  const std::string review_id = it->review_id;
  const std::size_t ordinal = it->ordinal;
  for (Sentence& s : next->sentences_) {
    if (s.review_id == review_id && s.ordinal > ordinal) ++s.ordinal;
  }
  Sentence a = first;
  Sentence b = second;
  a.ordinal = ordinal;
  b.ordinal = ordinal + 1;
  *it = a;
  next->sentences_.insert(it + 1, b);

  std::string contents;
  for (const Sentence& s : next->sentences_) contents += json(s).dump() + "\n";
  write_atomically(impl_->root / kSentencesFile, contents);
  impl_->publish(std::move(next));
}

void ProjectStore::append_annotation(const Annotation& a) {
  std::lock_guard write(impl_->write_mutex);
  auto next = impl_->copy_current();
  if (!next->sentence_index_.contains(a.sentence_id))
    throw NotFoundError("unknown sentence " + a.sentence_id);
  append_lines(impl_->root / kAnnotationsFile, {json(a)});
  next->annotations_.push_back(a);
  impl_->publish(std::move(next));
}

// ---------------------------------------------------------------------------
// Lock

ProjectLock::ProjectLock(const fs::path& root) : path_(root / ".qinu.lock") {
  for (int attempt = 0; attempt < 2; ++attempt) {
    const int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd >= 0) {
      const std::string pid = std::to_string(::getpid()) + "\n";
      [[maybe_unused]] auto n = ::write(fd, pid.data(), pid.size());
      ::close(fd);
      return;
    }
    if (errno != EEXIST) throw IoError("cannot create lockfile '" + path_.string() + "'");
    long holder = 0;
    std::ifstream(path_) >> holder;
    if (holder > 0 && (::kill(static_cast<pid_t>(holder), 0) == 0 || errno == EPERM))
      throw ConflictError("project is locked by process " + std::to_string(holder) + " (" +
                          path_.string() + ")");
    std::error_code ec;
    fs::remove(path_, ec);  // stale lock
  }
  throw ConflictError("project is locked (" + path_.string() + ")");
}

ProjectLock::~ProjectLock() {
  std::error_code ec;
  fs::remove(path_, ec);
}

}  // namespace qinu
