#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qinu/classifiers.hpp"
#include "qinu/corpus.hpp"
#include "qinu/types.hpp"

namespace qinu {

struct FoldPlan {
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::vector<std::size_t> fold_of;  // parallel to the dataset

  std::vector<std::size_t> test_indices(std::size_t fold) const;
  std::vector<std::size_t> train_indices(std::size_t fold) const;
};

/// Per class (fixed topic order), records sorted by sentence_id are shuffled
/// with a seeded generator and dealt round-robin; the dealing position
/// carries over between classes so fold totals also differ by at most one.
FoldPlan stratified_folds(const LabeledDataset& data, std::size_t k, std::uint64_t seed);

struct ConfusionMatrix {
  std::array<std::array<std::size_t, kTopicCount>, kTopicCount> counts{};  // [gold][predicted]

  void add(Topic gold, Topic predicted) { ++counts[index_of(gold)][index_of(predicted)]; }
  std::size_t total() const;
  std::size_t trace() const;
  std::size_t gold_support(Topic t) const;
  ConfusionMatrix& operator+=(const ConfusionMatrix& other);
};

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
  std::optional<double> auc;  // undefined without both positives and negatives
};

struct Metrics {
  std::array<ClassMetrics, kTopicCount> per_class;
  double macro_f1 = 0.0;
  double micro_f1 = 0.0;
  double accuracy = 0.0;
  std::optional<double> macro_auc;
  std::size_t total = 0;
};

/// Rank-based one-vs-rest AUC with tied pairs counted 1/2. Returns nullopt
/// when either side is empty.
std::optional<double> auc_rank(const std::vector<double>& scores, const std::vector<bool>& positive);

/// Subtracts the log-sum-exp over finite entries, turning naive Bayes
/// log-joint scores into log-posteriors comparable across sentences.
TopicScores normalize_log_scores(const TopicScores& scores);

/// Zero-denominator ratios are 0; macro averages cover classes with at least
/// one gold member. Empty scores skip AUC.
Metrics compute_metrics(const ConfusionMatrix& cm, const std::vector<TopicScores>& scores,
                        const std::vector<Topic>& gold);

struct LengthBucket {
  std::size_t min_len = 0;
  std::optional<std::size_t> max_len;  // inclusive; nullopt = unbounded
  std::size_t support = 0;
  double macro_f1 = 0.0;

  std::string label() const;
};

struct LengthBucketReport {
  std::vector<LengthBucket> buckets;
};

/// Default edges 1-4, 5-7, 8-12, 13+. Length 0 falls in the first bucket.
std::vector<LengthBucket> default_length_buckets();

LengthBucketReport length_bucket_report(const std::vector<Topic>& predictions,
                                        const std::vector<Topic>& gold,
                                        const std::vector<std::size_t>& lengths,
                                        std::vector<LengthBucket> buckets = default_length_buckets());

struct KeywordRanking {
  std::map<Topic, std::vector<std::pair<std::string, std::size_t>>> per_topic;
};

/// Annotated keyword tokens per topic (Other excluded), case-folded, top-k by
/// count with lexicographic tie-break.
KeywordRanking top_keywords(const LabeledDataset& gold, std::size_t k);

struct FoldResult {
  std::size_t fold = 0;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  std::size_t vocabulary_size = 0;
  std::array<std::size_t, kTopicCount> test_support{};
  bool leakage_check_passed = false;
  ConfusionMatrix confusion;
  Metrics metrics;
};

struct EvalConfig {
  ClassifierHyper hyper;
  std::shared_ptr<const Taxonomy> taxonomy;
  std::shared_ptr<const NgramTable> ngrams;  // SimSent n-gram backend; built per fold when null
  std::string config_hash;
  std::size_t keyword_top_k = 5;
};

struct EvalReport {
  ClassifierKind classifier = ClassifierKind::NaiveBayes;
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::vector<FoldResult> folds;
  ConfusionMatrix pooled_confusion;
  Metrics pooled;
  LengthBucketReport length_buckets;
  KeywordRanking keywords;
  // Pooled per-record outputs in dataset order (after sorting by sentence_id).
  std::vector<std::string> sentence_ids;
  std::vector<Topic> gold;
  std::vector<Topic> predicted;
};

/// Stratified k-fold cross-validation. Vocabularies and models come from
/// training folds only; throws std::logic_error if a leakage check fails.
EvalReport cross_validate(const LabeledDataset& data, ClassifierKind kind, std::size_t k,
                          std::uint64_t seed, const EvalConfig& config);

nlohmann::json metrics_to_json(const Metrics& m);
nlohmann::json confusion_to_json(const ConfusionMatrix& cm);
nlohmann::json keywords_to_json(const KeywordRanking& k);
nlohmann::json eval_report_to_json(const EvalReport& r);
std::string render_eval_report(const EvalReport& r);

}  // namespace qinu
