#pragma once

// Independent reference implementations used to check the evaluation module.
// They work from the raw (gold, predicted, score) triples, never from a
// ConfusionMatrix, and compute AUC by enumerating every pair.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "qinu/evaluation.hpp"

namespace qinu::oracle {

struct Instance {
  std::vector<Topic> gold;
  std::vector<Topic> predicted;
  std::vector<TopicScores> scores;
};

inline std::optional<double> pair_auc(const std::vector<double>& s, const std::vector<bool>& pos) {
  double hits = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!pos[i]) continue;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (pos[j]) continue;
      ++pairs;
      hits += s[i] > s[j] ? 1.0 : s[i] == s[j] ? 0.5 : 0.0;
    }
  }
  if (pairs == 0) return std::nullopt;
  return hits / static_cast<double>(pairs);
}

struct Expected {
  std::array<double, kTopicCount> precision{}, recall{}, f1{};
  std::array<std::optional<double>, kTopicCount> auc{};
  double macro_f1 = 0.0, accuracy = 0.0, micro_f1 = 0.0;
  std::optional<double> macro_auc;
};

inline Expected brute_force(const Instance& in) {
  Expected e;
  const std::size_t n = in.gold.size();
  std::size_t correct = 0;
  for (std::size_t i = 0; i < n; ++i) correct += in.gold[i] == in.predicted[i];
  e.accuracy = n ? static_cast<double>(correct) / n : 0.0;
  std::size_t tp_all = 0, fp_all = 0, fn_all = 0;
  double f1_sum = 0.0, auc_sum = 0.0;
  std::size_t supported = 0, auc_n = 0;
  for (std::size_t c = 0; c < kTopicCount; ++c) {
    const Topic t = kAllTopics[c];
    std::size_t tp = 0, fp = 0, fn = 0;
    std::vector<double> s;
    std::vector<bool> pos;
    for (std::size_t i = 0; i < n; ++i) {
      const bool g = in.gold[i] == t, p = in.predicted[i] == t;
      tp += g && p;
      fp += !g && p;
      fn += g && !p;
      s.push_back(in.scores[i][c]);
      pos.push_back(g);
    }
    tp_all += tp;
    fp_all += fp;
    fn_all += fn;
    e.precision[c] = tp + fp ? static_cast<double>(tp) / (tp + fp) : 0.0;
    e.recall[c] = tp + fn ? static_cast<double>(tp) / (tp + fn) : 0.0;
    const double pr = e.precision[c] + e.recall[c];
    e.f1[c] = pr > 0 ? 2 * e.precision[c] * e.recall[c] / pr : 0.0;
    e.auc[c] = pair_auc(s, pos);
    if (tp + fn > 0) {
      ++supported;
      f1_sum += e.f1[c];
      if (e.auc[c]) {
        ++auc_n;
        auc_sum += *e.auc[c];
      }
    }
  }
  e.macro_f1 = supported ? f1_sum / supported : 0.0;
  const double mp = tp_all + fp_all ? static_cast<double>(tp_all) / (tp_all + fp_all) : 0.0;
  const double mr = tp_all + fn_all ? static_cast<double>(tp_all) / (tp_all + fn_all) : 0.0;
  e.micro_f1 = mp + mr > 0 ? 2 * mp * mr / (mp + mr) : 0.0;
  if (auc_n) e.macro_auc = auc_sum / auc_n;
  return e;
}

/// Small random instance with coarse scores so ties are frequent.
inline Instance random_instance(std::mt19937_64& rng) {
  Instance in;
  const std::size_t n = 2 + rng() % 30;
  for (std::size_t i = 0; i < n; ++i) {
    in.gold.push_back(kAllTopics[rng() % kTopicCount]);
    TopicScores s{};
    for (double& x : s) x = static_cast<double>(rng() % 7) / 6.0;
    in.scores.push_back(s);
    // Mostly argmax, sometimes an arbitrary label, so metrics are not all 1.
    in.predicted.push_back(rng() % 4 == 0 ? kAllTopics[rng() % kTopicCount] : argmax_topic(s));
  }
  return in;
}

inline double max_abs_error(const Expected& e, const Metrics& m) {
  double err = 0.0;
  auto upd = [&](double a, double b) { err = std::max(err, std::abs(a - b)); };
  auto upd_opt = [&](const std::optional<double>& a, const std::optional<double>& b) {
    if (a.has_value() != b.has_value()) {
      err = std::numeric_limits<double>::infinity();
    } else if (a) {
      upd(*a, *b);
    }
  };
  for (std::size_t c = 0; c < kTopicCount; ++c) {
    upd(e.precision[c], m.per_class[c].precision);
    upd(e.recall[c], m.per_class[c].recall);
    upd(e.f1[c], m.per_class[c].f1);
    upd_opt(e.auc[c], m.per_class[c].auc);
  }
  upd(e.macro_f1, m.macro_f1);
  upd(e.micro_f1, m.micro_f1);
  upd(e.accuracy, m.accuracy);
  upd_opt(e.macro_auc, m.macro_auc);
  return err;
}

inline Metrics metrics_of(const Instance& in) {
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < in.gold.size(); ++i) cm.add(in.gold[i], in.predicted[i]);
  return compute_metrics(cm, in.scores, in.gold);
}

}  // namespace qinu::oracle
