#include "qinu/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <iomanip>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace qinu {

using nlohmann::json;

namespace {

std::string fold_case(const std::string& s) {
  std::string out = s;
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

struct PerClassCounts {
  std::size_t tp = 0, fp = 0, fn = 0;
};

PerClassCounts counts_for(const ConfusionMatrix& cm, std::size_t c) {
  PerClassCounts p;
  p.tp = cm.counts[c][c];
  for (std::size_t o = 0; o < kTopicCount; ++o) {
    if (o == c) continue;
    p.fp += cm.counts[o][c];
    p.fn += cm.counts[c][o];
  }
  return p;
}

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double harmonic(double p, double r) { return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r); }

double macro_f1_of(const ConfusionMatrix& cm) {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t c = 0; c < kTopicCount; ++c) {
    if (cm.gold_support(kAllTopics[c]) == 0) continue;
    const auto p = counts_for(cm, c);
    sum += harmonic(ratio(p.tp, p.tp + p.fp), ratio(p.tp, p.tp + p.fn));
    ++n;
  }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

std::vector<std::size_t> FoldPlan::test_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i) {
    if (fold_of[i] == fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldPlan::train_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i) {
    if (fold_of[i] != fold) out.push_back(i);
  }
  return out;
}

FoldPlan stratified_folds(const LabeledDataset& data, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw ValidationError("number of folds must be >= 2");
  std::array<std::vector<std::size_t>, kTopicCount> members;
  for (std::size_t i = 0; i < data.size(); ++i) members[index_of(data[i].topic)].push_back(i);
  std::string offending;
  for (Topic t : kAllTopics) {
    const auto n = members[index_of(t)].size();
    if (n > 0 && n < k)
      offending += (offending.empty() ? "" : ", ") + std::string(to_string(t)) + " (" + std::to_string(n) + ")";
  }
  if (!offending.empty())
    throw ValidationError("classes smaller than k=" + std::to_string(k) + ": " + offending);

  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.fold_of.assign(data.size(), 0);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  std::mt19937_64 rng(seq);
  std::size_t dealt = 0;
  for (auto& idx : members) {
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return data[a].sentence_id < data[b].sentence_id;
    });
    for (std::size_t i = idx.size(); i > 1; --i) std::swap(idx[i - 1], idx[static_cast<std::size_t>(rng() % i)]);
    for (std::size_t i : idx) plan.fold_of[i] = dealt++ % k;
  }
  return plan;
}

std::size_t ConfusionMatrix::total() const {
  std::size_t n = 0;
  for (const auto& row : counts) n += std::accumulate(row.begin(), row.end(), std::size_t{0});
  return n;
}

std::size_t ConfusionMatrix::trace() const {
  std::size_t n = 0;
  for (std::size_t c = 0; c < kTopicCount; ++c) n += counts[c][c];
  return n;
}

std::size_t ConfusionMatrix::gold_support(Topic t) const {
  const auto& row = counts[index_of(t)];
  return std::accumulate(row.begin(), row.end(), std::size_t{0});
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  for (std::size_t g = 0; g < kTopicCount; ++g) {
    for (std::size_t p = 0; p < kTopicCount; ++p) counts[g][p] += other.counts[g][p];
  }
  return *this;
}

std::optional<double> auc_rank(const std::vector<double>& scores, const std::vector<bool>& positive) {
  if (scores.size() != positive.size()) throw ValidationError("auc: scores and labels differ in length");
  const std::size_t n = scores.size();
  const auto n_pos = static_cast<std::size_t>(std::count(positive.begin(), positive.end(), true));
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) return std::nullopt;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double avg_rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t m = i; m <= j; ++m) {
      if (positive[order[m]]) rank_sum += avg_rank;
    }
    i = j + 1;
  }
  const double p = static_cast<double>(n_pos);
  return (rank_sum - p * (p + 1.0) / 2.0) / (p * static_cast<double>(n_neg));
}

TopicScores normalize_log_scores(const TopicScores& scores) {
  double hi = -std::numeric_limits<double>::infinity();
  for (double s : scores) hi = std::max(hi, s);
  if (!std::isfinite(hi)) return scores;
  double sum = 0.0;
  for (double s : scores) {
    if (std::isfinite(s)) sum += std::exp(s - hi);
  }
  const double lse = hi + std::log(sum);
  TopicScores out = scores;
  for (double& s : out) {
    if (std::isfinite(s)) s -= lse;
  }
  return out;
}

Metrics compute_metrics(const ConfusionMatrix& cm, const std::vector<TopicScores>& scores,
                        const std::vector<Topic>& gold) {
  const bool have_scores = !scores.empty();
  if ((have_scores && scores.size() != gold.size()) || cm.total() != gold.size())
    throw ValidationError("inconsistent inputs: confusion matrix, scores and gold labels disagree in size");
  std::array<std::size_t, kTopicCount> support{};
  for (Topic t : gold) ++support[index_of(t)];
  for (Topic t : kAllTopics) {
    if (cm.gold_support(t) != support[index_of(t)])
      throw ValidationError("inconsistent inputs: confusion matrix rows do not match gold labels");
  }

  Metrics m;
  m.total = gold.size();
  std::size_t tp = 0, fp = 0, fn = 0;
  double f1_sum = 0.0, auc_sum = 0.0;
  std::size_t f1_n = 0, auc_n = 0;
  for (std::size_t c = 0; c < kTopicCount; ++c) {
    const auto p = counts_for(cm, c);
    tp += p.tp;
    fp += p.fp;
    fn += p.fn;
    ClassMetrics& cmx = m.per_class[c];
    cmx.precision = ratio(p.tp, p.tp + p.fp);
    cmx.recall = ratio(p.tp, p.tp + p.fn);
    cmx.f1 = harmonic(cmx.precision, cmx.recall);
    cmx.support = support[c];
    if (have_scores) {
      std::vector<double> s(gold.size());
      std::vector<bool> pos(gold.size());
      for (std::size_t i = 0; i < gold.size(); ++i) {
        s[i] = scores[i][c];
        pos[i] = index_of(gold[i]) == c;
      }
      cmx.auc = auc_rank(s, pos);
    }
    if (support[c] > 0) {
      f1_sum += cmx.f1;
      ++f1_n;
      if (cmx.auc) {
        auc_sum += *cmx.auc;
        ++auc_n;
      }
    }
  }
  m.macro_f1 = f1_n == 0 ? 0.0 : f1_sum / static_cast<double>(f1_n);
  if (auc_n > 0) m.macro_auc = auc_sum / static_cast<double>(auc_n);
  m.accuracy = ratio(cm.trace(), cm.total());
  m.micro_f1 = harmonic(ratio(tp, tp + fp), ratio(tp, tp + fn));
  return m;
}

std::string LengthBucket::label() const {
  return max_len ? std::to_string(min_len) + "-" + std::to_string(*max_len) : std::to_string(min_len) + "+";
}

std::vector<LengthBucket> default_length_buckets() {
  return {{1, 4, 0, 0.0}, {5, 7, 0, 0.0}, {8, 12, 0, 0.0}, {13, std::nullopt, 0, 0.0}};
}

LengthBucketReport length_bucket_report(const std::vector<Topic>& predictions, const std::vector<Topic>& gold,
                                        const std::vector<std::size_t>& lengths,
                                        std::vector<LengthBucket> buckets) {
  if (predictions.size() != gold.size() || gold.size() != lengths.size())
    throw ValidationError("length bucket report: predictions, gold and lengths differ in length");
  if (buckets.empty()) throw ValidationError("length bucket report needs at least one bucket");
  std::vector<ConfusionMatrix> cms(buckets.size());
  for (std::size_t i = 0; i < gold.size(); ++i) {
    std::size_t b = 0;
    for (std::size_t j = 0; j < buckets.size(); ++j) {
      if (lengths[i] >= buckets[j].min_len && (!buckets[j].max_len || lengths[i] <= *buckets[j].max_len)) {
        b = j;
        break;
      }
      if (j + 1 == buckets.size()) b = lengths[i] < buckets.front().min_len ? 0 : j;
    }
    cms[b].add(gold[i], predictions[i]);
  }
  LengthBucketReport report;
  for (std::size_t j = 0; j < buckets.size(); ++j) {
    buckets[j].support = cms[j].total();
    buckets[j].macro_f1 = macro_f1_of(cms[j]);
  }
  report.buckets = std::move(buckets);
  return report;
}

KeywordRanking top_keywords(const LabeledDataset& gold, std::size_t k) {
  std::map<Topic, std::map<std::string, std::size_t>> counts;
  bool any = false;
  for (const GoldRecord& r : gold) {
    if (r.topic == Topic::Other || !r.keyword_span) continue;
    any = true;
    for (std::size_t i = r.keyword_span->start; i < r.keyword_span->end && i < r.tokens.size(); ++i)
      ++counts[r.topic][fold_case(r.tokens[i])];
  }
  if (!any) throw ValidationError("gold standard has no keyword spans");
  KeywordRanking ranking;
  for (Topic t : kScoredTopics) {
    std::vector<std::pair<std::string, std::size_t>> list(counts[t].begin(), counts[t].end());
    std::stable_sort(list.begin(), list.end(), [](const auto& a, const auto& b) {
      return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    if (list.size() > k) list.resize(k);
    ranking.per_topic[t] = std::move(list);
  }
  return ranking;
}

EvalReport cross_validate(const LabeledDataset& input, ClassifierKind kind, std::size_t k, std::uint64_t seed,
                          const EvalConfig& config) {
  LabeledDataset data = input;
  std::stable_sort(data.begin(), data.end(),
                   [](const GoldRecord& a, const GoldRecord& b) { return a.sentence_id < b.sentence_id; });
  const FoldPlan plan = stratified_folds(data, k, seed);

  EvalReport report;
  report.classifier = kind;
  report.k = k;
  report.seed = seed;
  report.config_hash = config.config_hash;
  std::vector<Topic> predicted(data.size(), Topic::Other);
  std::vector<TopicScores> scores(data.size());

  for (std::size_t f = 0; f < k; ++f) {
    const auto train_idx = plan.train_indices(f);
    const auto test_idx = plan.test_indices(f);
    LabeledDataset train, test;
    for (std::size_t i : train_idx) train.push_back(data[i]);
    for (std::size_t i : test_idx) test.push_back(data[i]);

    ClassifierHyper hyper = config.hyper;
    const ClassifierModel model = train_classifier(kind, train, hyper, config.taxonomy, config.ngrams);

    // Leakage check: the vocabulary and exemplars must come from training records only.
    std::unordered_set<std::string> train_terms, train_ids;
    for (const GoldRecord& r : train) {
      train_terms.insert(r.tokens.begin(), r.tokens.end());
      train_ids.insert(r.sentence_id);
    }
    bool clean = true;
    for (const GoldRecord& r : test) clean = clean && !train_ids.contains(r.sentence_id);
    if (auto vocab = model_vocabulary(model)) {
      for (const std::string& t : vocab->terms()) clean = clean && train_terms.contains(t);
      clean = clean && vocab->n_documents() == train.size();
    }
    if (const auto* sim = std::get_if<SimSentModel>(&model)) {
      for (const auto& ids : sim->exemplar_ids) {
        for (const std::string& id : ids) clean = clean && train_ids.contains(id);
      }
    }
    if (!clean) throw std::logic_error("train/test leakage detected in fold " + std::to_string(f));

    std::vector<Tokens> test_tokens;
    for (const GoldRecord& r : test) test_tokens.push_back(r.tokens);
    const auto preds = predict_all(model, test_tokens);

    FoldResult fr;
    fr.fold = f;
    fr.train_size = train.size();
    fr.test_size = test.size();
    fr.leakage_check_passed = clean;
    if (auto vocab = model_vocabulary(model)) fr.vocabulary_size = vocab->size();
    std::vector<TopicScores> fold_scores;
    std::vector<Topic> fold_gold;
    for (std::size_t i = 0; i < test.size(); ++i) {
      fr.confusion.add(test[i].topic, preds[i].topic);
      ++fr.test_support[index_of(test[i].topic)];
      // Ranking needs scores comparable across sentences; NB log-joints are not.
      const TopicScores ranked =
          kind == ClassifierKind::NaiveBayes ? normalize_log_scores(preds[i].scores) : preds[i].scores;
      fold_scores.push_back(ranked);
      fold_gold.push_back(test[i].topic);
      predicted[test_idx[i]] = preds[i].topic;
      scores[test_idx[i]] = ranked;
    }
    fr.metrics = compute_metrics(fr.confusion, fold_scores, fold_gold);
    report.pooled_confusion += fr.confusion;
    report.folds.push_back(std::move(fr));
  }

  std::vector<std::size_t> lengths;
  for (const GoldRecord& r : data) {
    report.sentence_ids.push_back(r.sentence_id);
    report.gold.push_back(r.topic);
    lengths.push_back(r.length_tokens);
  }
  report.predicted = predicted;
  report.pooled = compute_metrics(report.pooled_confusion, scores, report.gold);
  report.length_buckets = length_bucket_report(predicted, report.gold, lengths);
  const bool has_keywords = std::any_of(data.begin(), data.end(), [](const GoldRecord& r) {
    return r.topic != Topic::Other && r.keyword_span.has_value();
  });
  if (has_keywords) report.keywords = top_keywords(data, config.keyword_top_k);
  return report;
}

json metrics_to_json(const Metrics& m) {
  json per_class = json::object();
  for (Topic t : kAllTopics) {
    const ClassMetrics& c = m.per_class[index_of(t)];
    per_class[std::string(to_string(t))] = {{"precision", c.precision}, {"recall", c.recall}, {"f1", c.f1},
                                            {"support", c.support},     {"auc", optional_json(c.auc)}};
  }
  return json{{"per_class", std::move(per_class)}, {"macro_f1", m.macro_f1}, {"micro_f1", m.micro_f1},
              {"accuracy", m.accuracy},          {"macro_auc", optional_json(m.macro_auc)},
              {"total", m.total}};
}

json confusion_to_json(const ConfusionMatrix& cm) {
  json rows = json::array();
  for (const auto& row : cm.counts) rows.push_back(row);
  json labels = json::array();
  for (Topic t : kAllTopics) labels.push_back(to_string(t));
  return json{{"labels", std::move(labels)}, {"rows_gold_cols_predicted", std::move(rows)}};
}

json keywords_to_json(const KeywordRanking& k) {
  json j = json::object();
  for (const auto& [topic, list] : k.per_topic) {
    json arr = json::array();
    for (const auto& [word, count] : list) arr.push_back({{"keyword", word}, {"count", count}});
    j[std::string(to_string(topic))] = std::move(arr);
  }
  return j;
}

json eval_report_to_json(const EvalReport& r) {
  json folds = json::array();
  for (const FoldResult& f : r.folds) {
    json support = json::object();
    for (Topic t : kAllTopics) support[std::string(to_string(t))] = f.test_support[index_of(t)];
    folds.push_back({{"fold", f.fold},
                     {"train_size", f.train_size},
                     {"test_size", f.test_size},
                     {"test_support", std::move(support)},
                     {"vocabulary_size", f.vocabulary_size},
                     {"leakage_check", f.leakage_check_passed ? "passed" : "failed"},
                     {"confusion", confusion_to_json(f.confusion)},
                     {"metrics", metrics_to_json(f.metrics)}});
  }
  json buckets = json::array();
  for (const LengthBucket& b : r.length_buckets.buckets)
    buckets.push_back({{"bucket", b.label()}, {"support", b.support}, {"macro_f1", b.macro_f1}});
  return json{{"classifier", to_string(r.classifier)},
              {"k", r.k},
              {"seed", r.seed},
              {"config_hash", r.config_hash},
              {"stratified", true},
              {"folds", std::move(folds)},
              {"pooled", {{"metrics", metrics_to_json(r.pooled)}, {"confusion", confusion_to_json(r.pooled_confusion)}}},
              {"length_buckets", std::move(buckets)},
              {"keywords", keywords_to_json(r.keywords)},
              {"notes",
               {"precision, recall and F1 are 0 when their denominator is 0",
                "macro averages cover classes with at least one gold member",
                "AUC is one-vs-rest with tied score pairs counted 1/2"}}};
}

std::string render_eval_report(const EvalReport& r) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4);
  os << "Cross-validation: classifier=" << to_string(r.classifier) << " k=" << r.k << " seed=" << r.seed
     << " config=" << r.config_hash << "\n";
  for (const FoldResult& f : r.folds) {
    os << "  fold " << f.fold << ": train=" << f.train_size << " test=" << f.test_size
       << " macro-F1=" << f.metrics.macro_f1 << " accuracy=" << f.metrics.accuracy
       << " leakage-check=" << (f.leakage_check_passed ? "passed" : "FAILED") << "\n";
  }
  os << "  pooled: macro-F1=" << r.pooled.macro_f1 << " micro-F1=" << r.pooled.micro_f1
     << " accuracy=" << r.pooled.accuracy << " macro-AUC=";
  if (r.pooled.macro_auc) {
    os << *r.pooled.macro_auc;
  } else {
    os << "n/a";
  }
  os << "\n  per class:\n";
  for (Topic t : kAllTopics) {
    const ClassMetrics& c = r.pooled.per_class[index_of(t)];
    os << "    " << std::left << std::setw(18) << to_string(t) << std::right << " P=" << c.precision
       << " R=" << c.recall << " F1=" << c.f1 << " n=" << c.support << "\n";
  }
  os << "  sentence length buckets:\n";
  for (const LengthBucket& b : r.length_buckets.buckets)
    os << "    " << std::left << std::setw(6) << b.label() << std::right << " n=" << b.support
       << " macro-F1=" << b.macro_f1 << "\n";
  if (!r.keywords.per_topic.empty()) {
    os << "  top keywords:\n";
    for (const auto& [topic, list] : r.keywords.per_topic) {
      os << "    " << std::left << std::setw(18) << to_string(topic) << std::right;
      for (const auto& [w, c] : list) os << " " << w << "(" << c << ")";
      os << "\n";
    }
  }
  return os.str();
}

}  // namespace qinu
