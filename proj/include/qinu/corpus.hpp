#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qinu/text_pipeline.hpp"
#include "qinu/types.hpp"

namespace qinu {

struct Review {
  std::string review_id;
  std::string source;
  std::string product_id;
  int stars = 0;
  std::string title;
  std::string body;
  std::optional<std::string> date;
  long long helpfulness_votes = 0;

  void validate() const;
};

enum class SentenceOrigin { Auto, ManualSplit };

struct Sentence {
  std::string sentence_id;
  std::string review_id;
  std::size_t ordinal = 0;
  std::string text;
  std::size_t span_start = 0;  // byte offsets into Review::body, [start, end)
  std::size_t span_end = 0;
  SentenceOrigin origin = SentenceOrigin::Auto;
  bool needs_review = false;
};

struct Annotation {
  std::string sentence_id;
  Topic topic = Topic::Other;
  std::optional<TokenSpan> keyword_span;
  std::optional<TokenSpan> opinion_span;
  std::optional<TokenSpan> modifier_span;
  Polarity polarity = Polarity::Neutral;
  std::string annotator_id;
  std::string timestamp;
};

void to_json(nlohmann::json& j, const Review& r);
void from_json(const nlohmann::json& j, Review& r);
void to_json(nlohmann::json& j, const Sentence& s);
void from_json(const nlohmann::json& j, Sentence& s);
void to_json(nlohmann::json& j, const Annotation& a);
void from_json(const nlohmann::json& j, Annotation& a);

nlohmann::json span_to_json(const std::optional<TokenSpan>& span);
std::optional<TokenSpan> span_from_json(const nlohmann::json& j);

/// One gold-standard record: the resolved annotation for a sentence with
/// its text and tokenization under the project pipeline.
struct GoldRecord {
  std::string sentence_id;
  std::string review_id;
  std::string product_id;
  std::string text;
  Tokens tokens;
  std::size_t length_tokens = 0;
  Topic topic = Topic::Other;
  Polarity polarity = Polarity::Neutral;
  std::optional<TokenSpan> keyword_span;
  std::optional<TokenSpan> opinion_span;
  std::optional<TokenSpan> modifier_span;
};

using LabeledDataset = std::vector<GoldRecord>;

void to_json(nlohmann::json& j, const GoldRecord& r);
void from_json(const nlohmann::json& j, GoldRecord& r);

/// Immutable view of a project store. Mutations publish a new snapshot, so a
/// snapshot obtained earlier stays valid and unchanged.
class StoreSnapshot {
 public:
  const std::vector<Review>& reviews() const { return reviews_; }
  const std::vector<Sentence>& sentences() const { return sentences_; }
  const std::vector<Annotation>& annotations() const { return annotations_; }
  const std::vector<std::string>& selection() const { return selection_; }

  const Review* find_review(const std::string& id) const;
  const Sentence* find_sentence(const std::string& id) const;
  /// Sentences of one review in ordinal order.
  std::vector<const Sentence*> sentences_of(const std::string& review_id) const;
  bool is_annotated(const std::string& sentence_id) const;
  std::size_t annotated_sentence_count() const;

 private:
  friend class ProjectStore;
  void reindex();

  std::vector<Review> reviews_;
  std::vector<Sentence> sentences_;
  std::vector<Annotation> annotations_;
  std::vector<std::string> selection_;
  std::unordered_map<std::string, std::size_t> review_index_;
  std::unordered_map<std::string, std::size_t> sentence_index_;
  std::unordered_map<std::string, std::size_t> annotation_counts_;
};

/// File-backed project store. All mutations go through a single writer lock;
/// readers take snapshots and never block writers.
class ProjectStore {
 public:
  static constexpr const char* kReviewsFile = "reviews.jsonl";
  static constexpr const char* kSentencesFile = "sentences.jsonl";
  static constexpr const char* kAnnotationsFile = "annotations.jsonl";
  static constexpr const char* kSelectionFile = "selection.json";
  static constexpr const char* kConfigFile = "config.json";

  /// Creates the directory and empty record files. Existing files are kept.
  static ProjectStore create(const std::filesystem::path& root);
  /// Opens an existing project; throws NotFoundError when it is missing.
  static ProjectStore open(const std::filesystem::path& root);

  ProjectStore(ProjectStore&&) noexcept;
  ProjectStore& operator=(ProjectStore&&) noexcept;
  ~ProjectStore();

  const std::filesystem::path& root() const;
  std::filesystem::path config_file() const { return root() / kConfigFile; }

  std::shared_ptr<const StoreSnapshot> snapshot() const;

  /// Appends reviews whose ids are not yet stored; returns how many were new.
  std::size_t append_reviews(const std::vector<Review>& reviews);
  void set_selection(std::vector<std::string> review_ids);
  void append_sentences(const std::vector<Sentence>& sentences);
  /// Replaces one sentence with two halves and renumbers the review.
  void replace_sentence(const std::string& sentence_id, const Sentence& first,
                        const Sentence& second);
  void append_annotation(const Annotation& a);

 private:
  struct Impl;
  explicit ProjectStore(std::unique_ptr<Impl> impl);
  std::unique_ptr<Impl> impl_;
};

/// Exclusive inter-process project lock held for the object's lifetime.
class ProjectLock {
 public:
  explicit ProjectLock(const std::filesystem::path& root);
  ProjectLock(const ProjectLock&) = delete;
  ProjectLock& operator=(const ProjectLock&) = delete;
  ~ProjectLock();

 private:
  std::filesystem::path path_;
};

struct LineWarning {
  std::size_t line = 0;
  std::string message;
};

struct IngestResult {
  std::size_t added = 0;
  std::size_t duplicates = 0;
  std::vector<LineWarning> warnings;
};

/// Reads a reviews JSONL file. With strict=true the first malformed record
/// aborts the whole ingest before anything is written.
IngestResult ingest_reviews(const std::filesystem::path& path, ProjectStore& store,
                            bool strict = false);

/// Top reviews per star value by helpfulness_votes desc, then review_id asc.
/// The selection is persisted in the store.
std::vector<std::string> sample_balanced(ProjectStore& store, int per_star);

struct SegmentationConfig {
  std::vector<std::string> abbreviations = {"e.g.", "i.e.", "etc.", "vs.", "mr.", "mrs.",
                                            "ms.",  "dr.",  "approx.", "incl."};
  std::size_t max_tokens = 60;

  void validate() const;
};

std::string sentence_id_for(const std::string& review_id, std::size_t ordinal);

/// Splits on ., ! and ? followed by whitespace or end of text unless the
/// word ending there is a listed abbreviation. Spans cover trimmed fragments.
std::vector<Sentence> segment_review(const Review& review, const SegmentationConfig& rules);

struct SegmentResult {
  std::size_t reviews_segmented = 0;
  std::size_t sentences_added = 0;
  std::size_t flagged = 0;
};

/// Segments the selected reviews (all reviews when nothing is selected)
/// that have no sentences yet.
SegmentResult segment_store(ProjectStore& store, const SegmentationConfig& rules);

/// char_offset is a byte offset into the review body strictly inside the
/// sentence span. The halves get ids "<id>a" and "<id>b".
std::pair<Sentence, Sentence> split_sentence(ProjectStore& store, const std::string& sentence_id,
                                             std::size_t char_offset, std::size_t max_tokens = 60);

std::string utc_timestamp_now();

/// Validates against the store and appends. An empty timestamp is filled
/// with the current UTC time.
Annotation record_annotation(Annotation a, ProjectStore& store, const PipelineConfig& pipeline);

struct GoldExport {
  LabeledDataset records;
  std::size_t dropped_conflicts = 0;
  std::vector<std::string> warnings;
};

/// One record per annotated sentence ordered by sentence_id. The latest
/// annotation per annotator counts; annotators are reconciled by majority
/// topic and tied sentences are dropped.
GoldExport export_gold(const ProjectStore& store, const PipelineConfig& pipeline);

/// Checks spans of a gold record against its tokens; throws ValidationError.
void validate_gold_record(const GoldRecord& r);

}  // namespace qinu
