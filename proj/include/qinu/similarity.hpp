#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include <json.hpp>

#include "qinu/text_pipeline.hpp"

namespace qinu {

/// A forest of synsets under an implicit virtual root. Top-level synsets
/// (parent null) sit at depth 1; the virtual root is depth 0.
class Taxonomy {
 public:
  struct Synset {
    std::string id;
    std::vector<std::string> words;
    std::optional<std::string> parent;
  };

  static Taxonomy from_synsets(std::vector<Synset> synsets);
  static Taxonomy from_json(const nlohmann::json& j);
  static Taxonomy load(const std::string& path);
  nlohmann::json to_json() const;

  std::size_t synset_count() const { return synsets_.size(); }
  /// Synset indices containing the (case-folded) word; empty when unknown.
  const std::vector<std::size_t>& synsets_of(std::string_view word) const;
  std::size_t depth(std::size_t synset) const { return depth_.at(synset); }

  struct PathInfo {
    std::size_t length = 0;          // edges between the two synsets
    std::size_t ancestor_depth = 0;  // depth of the deepest common ancestor; 0 when none
    bool connected = false;
  };
  PathInfo path(std::size_t a, std::size_t b) const;

 private:
  std::vector<Synset> synsets_;
  std::vector<std::size_t> parent_;  // npos for top-level synsets
  std::vector<std::size_t> depth_;
  std::unordered_map<std::string, std::vector<std::size_t>> word_index_;
};

struct WordSimParams {
  double alpha = 0.2;
  double beta = 0.45;

  void validate() const;
};

/// Trigram and unigram frequencies standing in for a web-scale n-gram corpus.
class NgramTable {
 public:
  using Trigram = std::array<std::string, 3>;

  static NgramTable from_counts(std::unordered_map<std::string, std::size_t> unigrams,
                                std::vector<std::pair<Trigram, std::size_t>> trigrams);
  /// Counts unigrams and consecutive trigrams over token lists.
  static NgramTable build(const std::vector<Tokens>& docs);
  static NgramTable from_json(const nlohmann::json& j);
  static NgramTable load(const std::string& path);
  nlohmann::json to_json() const;

  std::size_t unigram(std::string_view w) const;
  std::size_t total_unigrams() const { return total_; }
  std::size_t trigram_count() const { return trigrams_.size(); }
  /// Mean count over stored trigrams containing both words; 0 when none.
  double mean_cooccurrence(std::string_view w1, std::string_view w2) const;

 private:
  std::unordered_map<std::string, std::size_t> unigrams_;
  std::vector<std::pair<Trigram, std::size_t>> trigrams_;  // sorted for stable output
  std::unordered_map<std::string, std::vector<std::size_t>> by_word_;
  std::size_t total_ = 0;
};

/// max over synset pairs of exp(-alpha*l) * tanh(beta*h); identical words
/// score 1 and unknown words 0.
double word_similarity_taxonomy(std::string_view w1, std::string_view w2, const Taxonomy& tax,
                                const WordSimParams& p = {});

/// min(1, mu / max(c(w1), c(w2))) with mu the mean co-occurring trigram count.
double word_relatedness_ngram(std::string_view w1, std::string_view w2, const NgramTable& table);

enum class SimilarityBackend { Taxonomy, Ngram };

std::string_view to_string(SimilarityBackend b);
SimilarityBackend parse_backend(std::string_view s);

struct SentenceSimParams {
  double delta = 0.85;            // weight of semantic similarity against word order
  double order_threshold = 0.4;   // minimum word similarity for an order-vector match
  SimilarityBackend backend = SimilarityBackend::Taxonomy;
  WordSimParams word;

  void validate() const;
};

/// Shared, immutable knowledge source for sentence similarity.
using Knowledge = std::variant<std::shared_ptr<const Taxonomy>, std::shared_ptr<const NgramTable>>;

/// Semantic-vector cosine blended with word-order similarity over the joint
/// word set. Throws ValidationError when either sentence is empty or when the
/// knowledge source does not match params.backend.
double sentence_similarity(const Tokens& s1, const Tokens& s2, const SentenceSimParams& params,
                           const Knowledge& knowledge);

/// Reusable scorer that caches word-pair similarities. Not thread-safe; use
/// one instance per thread.
class SentenceSimilarity {
 public:
  SentenceSimilarity(SentenceSimParams params, Knowledge knowledge);

  double operator()(const Tokens& s1, const Tokens& s2);
  double word(const std::string& w1, const std::string& w2);

  const SentenceSimParams& params() const { return params_; }
  const Knowledge& knowledge() const { return knowledge_; }

 private:
  SentenceSimParams params_;
  Knowledge knowledge_;
  std::size_t intern(const std::string& w);
  double word_by_id(std::size_t a, std::size_t b);

  std::unordered_map<std::string, std::size_t> ids_;
  std::vector<std::string> words_;
  std::unordered_map<std::uint64_t, double> cache_;
};

}  // namespace qinu
