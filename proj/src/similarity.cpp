#include "qinu/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>

#include "qinu/types.hpp"

namespace qinu {

using nlohmann::json;

namespace {

constexpr std::size_t kNoParent = std::numeric_limits<std::size_t>::max();

std::string fold(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Taxonomy

Taxonomy Taxonomy::from_synsets(std::vector<Synset> synsets) {
  Taxonomy t;
  std::unordered_map<std::string, std::size_t> by_id;
  for (std::size_t i = 0; i < synsets.size(); ++i) {
    if (synsets[i].words.empty())
      throw ValidationError("synset '" + synsets[i].id + "' has no member words");
    if (!by_id.emplace(synsets[i].id, i).second)
      throw ValidationError("duplicate synset id '" + synsets[i].id + "'");
  }
  t.parent_.assign(synsets.size(), kNoParent);
  for (std::size_t i = 0; i < synsets.size(); ++i) {
    if (!synsets[i].parent) continue;
    auto it = by_id.find(*synsets[i].parent);
    if (it == by_id.end())
      throw ValidationError("synset '" + synsets[i].id + "' has unknown parent '" +
                            *synsets[i].parent + "'");
    t.parent_[i] = it->second;
  }
  t.depth_.assign(synsets.size(), 0);
  for (std::size_t i = 0; i < synsets.size(); ++i) {
    std::size_t d = 1;
    std::size_t cur = t.parent_[i];
    while (cur != kNoParent) {
      if (++d > synsets.size() + 1)
        throw ValidationError("taxonomy contains a cycle through '" + synsets[i].id + "'");
      cur = t.parent_[cur];
    }
    t.depth_[i] = d;
  }
  for (std::size_t i = 0; i < synsets.size(); ++i) {
    for (const std::string& w : synsets[i].words) {
      auto& list = t.word_index_[fold(w)];
      if (list.empty() || list.back() != i) list.push_back(i);
    }
  }
  t.synsets_ = std::move(synsets);
  return t;
}

Taxonomy Taxonomy::from_json(const json& j) {
  if (!j.is_object() || !j.contains("synsets") || !j["synsets"].is_array())
    throw ValidationError("taxonomy JSON must be an object with a \"synsets\" array");
  std::vector<Synset> synsets;
  for (const json& s : j["synsets"]) {
    Synset syn;
    try {
      syn.id = s.at("id").get<std::string>();
      syn.words = s.at("words").get<std::vector<std::string>>();
      const json& parent = s.value("parent", json(nullptr));
      if (!parent.is_null()) syn.parent = parent.get<std::string>();
    } catch (const json::exception& e) {
      throw ValidationError(std::string("malformed synset: ") + e.what());
    }
    synsets.push_back(std::move(syn));
  }
  return from_synsets(std::move(synsets));
}

Taxonomy Taxonomy::load(const std::string& path) { return from_json(read_json_file(path)); }

json Taxonomy::to_json() const {
  json arr = json::array();
  for (const Synset& s : synsets_) {
    arr.push_back({{"id", s.id},
                   {"words", s.words},
                   {"parent", s.parent ? json(*s.parent) : json(nullptr)}});
  }
  return json{{"synsets", std::move(arr)}};
}

const std::vector<std::size_t>& Taxonomy::synsets_of(std::string_view word) const {
  static const std::vector<std::size_t> none;
  auto it = word_index_.find(fold(word));
  return it == word_index_.end() ? none : it->second;
}

Taxonomy::PathInfo Taxonomy::path(std::size_t a, std::size_t b) const {
  std::vector<std::pair<std::size_t, std::size_t>> up;  // (ancestor, distance from a)
  for (std::size_t cur = a, d = 0; cur != kNoParent; cur = parent_[cur], ++d) up.emplace_back(cur, d);
  for (std::size_t cur = b, d = 0; cur != kNoParent; cur = parent_[cur], ++d) {
    for (const auto& [anc, da] : up) {
      if (anc == cur) return {da + d, depth_[cur], true};
    }
  }
  return {depth_[a] + depth_[b], 0, false};
}

void WordSimParams::validate() const {
  if (!(alpha >= 0.0)) throw ValidationError("similarity.alpha must be >= 0");
  if (!(beta > 0.0)) throw ValidationError("similarity.beta must be > 0");
}

double word_similarity_taxonomy(std::string_view w1, std::string_view w2, const Taxonomy& tax,
                                const WordSimParams& p) {
  if (fold(w1) == fold(w2)) return 1.0;
  const auto& s1 = tax.synsets_of(w1);
  const auto& s2 = tax.synsets_of(w2);
  double best = 0.0;
  for (std::size_t a : s1) {
    for (std::size_t b : s2) {
      const auto info = tax.path(a, b);
      if (!info.connected) continue;
      const double sim = std::exp(-p.alpha * static_cast<double>(info.length)) *
                         std::tanh(p.beta * static_cast<double>(info.ancestor_depth));
      best = std::max(best, sim);
    }
  }
  return std::clamp(best, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// N-gram table

NgramTable NgramTable::from_counts(std::unordered_map<std::string, std::size_t> unigrams,
                                   std::vector<std::pair<Trigram, std::size_t>> trigrams) {
  NgramTable t;
  for (const auto& [w, c] : unigrams) {
    if (c == 0) throw ValidationError("unigram '" + w + "' has a zero count");
    t.total_ += c;
  }
  std::map<Trigram, std::size_t> merged;
  for (const auto& [tri, c] : trigrams) {
    if (c == 0) throw ValidationError("trigram counts must be >= 1");
    merged[tri] += c;
  }
  t.unigrams_ = std::move(unigrams);
  t.trigrams_.assign(merged.begin(), merged.end());
  for (std::size_t i = 0; i < t.trigrams_.size(); ++i) {
    std::set<std::string> distinct(t.trigrams_[i].first.begin(), t.trigrams_[i].first.end());
    for (const std::string& w : distinct) t.by_word_[w].push_back(i);
  }
  return t;
}

NgramTable NgramTable::build(const std::vector<Tokens>& docs) {
  std::unordered_map<std::string, std::size_t> uni;
  std::vector<std::pair<Trigram, std::size_t>> tri;
  for (const Tokens& d : docs) {
    for (const std::string& w : d) ++uni[w];
    for (std::size_t i = 0; i + 2 < d.size(); ++i) tri.push_back({{d[i], d[i + 1], d[i + 2]}, 1});
  }
  return from_counts(std::move(uni), std::move(tri));
}

NgramTable NgramTable::from_json(const json& j) {
  if (!j.is_object() || !j.contains("unigrams") || !j.contains("trigrams"))
    throw ValidationError("n-gram JSON must have \"unigrams\" and \"trigrams\"");
  std::unordered_map<std::string, std::size_t> uni;
  std::vector<std::pair<Trigram, std::size_t>> tri;
  try {
    for (const auto& [w, c] : j["unigrams"].items()) uni[w] = c.get<std::size_t>();
    for (const json& t : j["trigrams"]) {
      const auto words = t.at("w").get<std::vector<std::string>>();
      if (words.size() != 3) throw ValidationError("trigram entries need exactly three words");
      tri.push_back({{words[0], words[1], words[2]}, t.at("count").get<std::size_t>()});
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed n-gram table: ") + e.what());
  }
  return from_counts(std::move(uni), std::move(tri));
}

NgramTable NgramTable::load(const std::string& path) { return from_json(read_json_file(path)); }

json NgramTable::to_json() const {
  json uni = json::object();
  for (const auto& [w, c] : unigrams_) uni[w] = c;
  json tri = json::array();
  for (const auto& [t, c] : trigrams_) tri.push_back({{"w", {t[0], t[1], t[2]}}, {"count", c}});
  return json{{"unigrams", std::move(uni)}, {"trigrams", std::move(tri)}};
}

std::size_t NgramTable::unigram(std::string_view w) const {
  auto it = unigrams_.find(std::string(w));
  return it == unigrams_.end() ? 0 : it->second;
}

double NgramTable::mean_cooccurrence(std::string_view w1, std::string_view w2) const {
  auto a = by_word_.find(std::string(w1));
  auto b = by_word_.find(std::string(w2));
  if (a == by_word_.end() || b == by_word_.end()) return 0.0;
  const auto& small = a->second.size() <= b->second.size() ? a->second : b->second;
  const std::string_view other = a->second.size() <= b->second.size() ? w2 : w1;
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t idx : small) {
    const auto& [tri, count] = trigrams_[idx];
    if (std::find(tri.begin(), tri.end(), other) != tri.end()) {
      sum += static_cast<double>(count);
      ++n;
    }
  }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

double word_relatedness_ngram(std::string_view w1, std::string_view w2, const NgramTable& table) {
  const std::string a = fold(w1);
  const std::string b = fold(w2);
  if (a == b) return 1.0;
  const std::size_t ca = table.unigram(a);
  const std::size_t cb = table.unigram(b);
  if (ca == 0 || cb == 0) return 0.0;
  const double mu = table.mean_cooccurrence(a, b);
  if (mu <= 0.0) return 0.0;
  return std::min(1.0, mu / static_cast<double>(std::max(ca, cb)));
}

// ---------------------------------------------------------------------------
// Sentence similarity

std::string_view to_string(SimilarityBackend b) {
  return b == SimilarityBackend::Taxonomy ? "taxonomy" : "ngram";
}

SimilarityBackend parse_backend(std::string_view s) {
  if (s == "taxonomy") return SimilarityBackend::Taxonomy;
  if (s == "ngram") return SimilarityBackend::Ngram;
  throw ValidationError("unknown similarity backend '" + std::string(s) +
                        "' (expected taxonomy or ngram)");
}

void SentenceSimParams::validate() const {
  if (!(delta >= 0.0 && delta <= 1.0)) throw ValidationError("similarity.delta must be in [0,1]");
  if (!(order_threshold >= 0.0 && order_threshold <= 1.0))
    throw ValidationError("similarity.order_threshold must be in [0,1]");
  word.validate();
}

SentenceSimilarity::SentenceSimilarity(SentenceSimParams params, Knowledge knowledge)
    : params_(params), knowledge_(std::move(knowledge)) {
  params_.validate();
  const bool is_tax = std::holds_alternative<std::shared_ptr<const Taxonomy>>(knowledge_);
  if (is_tax != (params_.backend == SimilarityBackend::Taxonomy))
    throw ValidationError("similarity backend '" + std::string(to_string(params_.backend)) +
                          "' does not match the supplied knowledge source");
  const bool null = std::visit([](const auto& p) { return p == nullptr; }, knowledge_);
  if (null) throw ValidationError("similarity knowledge source is missing");
}

std::size_t SentenceSimilarity::intern(const std::string& w) {
  auto [it, inserted] = ids_.emplace(w, words_.size());
  if (inserted) words_.push_back(w);
  return it->second;
}

double SentenceSimilarity::word_by_id(std::size_t a, std::size_t b) {
  if (a == b) return 1.0;
  if (a > b) std::swap(a, b);
  const std::uint64_t key = (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b);
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  double sim = 0.0;
  if (const auto* tax = std::get_if<std::shared_ptr<const Taxonomy>>(&knowledge_)) {
    sim = word_similarity_taxonomy(words_[a], words_[b], **tax, params_.word);
  } else {
    sim = word_relatedness_ngram(words_[a], words_[b],
                                 *std::get<std::shared_ptr<const NgramTable>>(knowledge_));
  }
  cache_.emplace(key, sim);
  return sim;
}

double SentenceSimilarity::word(const std::string& w1, const std::string& w2) {
  return word_by_id(intern(w1), intern(w2));
}

double SentenceSimilarity::operator()(const Tokens& s1, const Tokens& s2) {
  if (s1.empty() || s2.empty())
    throw ValidationError("sentence similarity needs two non-empty token lists");
  std::vector<std::size_t> a, b, joint;
  a.reserve(s1.size());
  b.reserve(s2.size());
  for (const auto& w : s1) a.push_back(intern(w));
  for (const auto& w : s2) b.push_back(intern(w));
  for (std::size_t id : a) {
    if (std::find(joint.begin(), joint.end(), id) == joint.end()) joint.push_back(id);
  }
  for (std::size_t id : b) {
    if (std::find(joint.begin(), joint.end(), id) == joint.end()) joint.push_back(id);
  }

  const std::size_t n = joint.size();
  std::vector<double> v1(n), v2(n), r1(n), r2(n);
  auto fill = [&](const std::vector<std::size_t>& sent, std::vector<double>& v,
                  std::vector<double>& r) {
    for (std::size_t i = 0; i < n; ++i) {
      double best = -1.0;
      std::size_t pos = 0;
      for (std::size_t k = 0; k < sent.size(); ++k) {
        const double s = word_by_id(joint[i], sent[k]);
        if (s > best) {
          best = s;
          pos = k;
        }
      }
      v[i] = best;
      r[i] = best > params_.order_threshold ? static_cast<double>(pos + 1) : 0.0;
    }
  };
  fill(a, v1, r1);
  fill(b, v2, r2);

  double semantic = 0.0;
  if (v1 == v2) {
    semantic = 1.0;
  } else {
    double d = 0.0, n1 = 0.0, n2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d += v1[i] * v2[i];
      n1 += v1[i] * v1[i];
      n2 += v2[i] * v2[i];
    }
    semantic = (n1 > 0.0 && n2 > 0.0) ? d / (std::sqrt(n1) * std::sqrt(n2)) : 0.0;
  }

  double order = 1.0;
  if (r1 != r2) {
    double diff = 0.0, sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      diff += (r1[i] - r2[i]) * (r1[i] - r2[i]);
      sum += (r1[i] + r2[i]) * (r1[i] + r2[i]);
    }
    order = 1.0 - std::sqrt(diff) / std::sqrt(sum);
  }

  return std::clamp(order + params_.delta * (semantic - order), 0.0, 1.0);
}

double sentence_similarity(const Tokens& s1, const Tokens& s2, const SentenceSimParams& params,
                           const Knowledge& knowledge) {
  SentenceSimilarity scorer(params, knowledge);
  return scorer(s1, s2);
}

}  // namespace qinu
