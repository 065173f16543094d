#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace qinu {

using Tokens = std::vector<std::string>;
using TermId = std::size_t;

/// The stopword list shipped with the library. Negators and intensifiers are
/// deliberately absent so polarity scoring can see them.
const std::unordered_set<std::string>& default_stopwords();

struct PipelineConfig {
  bool lowercase = true;
  bool strip_punctuation = true;
  std::unordered_set<std::string> stopwords = default_stopwords();
  std::size_t min_token_len = 1;

  void validate() const;
};

/// Reads a stopword file: UTF-8, one token per line, blank lines ignored.
std::unordered_set<std::string> load_stopwords(const std::string& path);

/// Whitespace split (ASCII and Unicode spaces), edge punctuation stripping,
/// lowercasing, stopword removal and minimum-length filtering, in that order.
Tokens tokenize(std::string_view text, const PipelineConfig& config);

/// Token count before stopword removal and the length filter. This is the
/// sentence length used for length-bucket analysis.
std::size_t count_length_tokens(std::string_view text, const PipelineConfig& config);

class Vocabulary {
 public:
  Vocabulary() = default;

  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }
  std::size_t n_documents() const { return n_documents_; }

  const std::string& term(TermId id) const { return terms_.at(id); }
  std::size_t document_frequency(TermId id) const { return df_.at(id); }
  const std::vector<std::string>& terms() const { return terms_; }

  /// Term id, or size() when the term is unknown.
  TermId find(std::string_view term) const;
  bool contains(std::string_view term) const { return find(term) != size(); }

  /// Rebuilds a vocabulary from serialized parts.
  static Vocabulary from_parts(std::vector<std::string> terms, std::vector<std::size_t> df,
                               std::size_t n_documents);

  friend Vocabulary build_vocabulary(const std::vector<Tokens>& docs);

  bool operator==(const Vocabulary& other) const {
    return terms_ == other.terms_ && df_ == other.df_ && n_documents_ == other.n_documents_;
  }

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const { return std::hash<std::string_view>{}(s); }
  };

  std::vector<std::string> terms_;
  std::vector<std::size_t> df_;
  std::unordered_map<std::string, TermId, Hash, std::equal_to<>> index_;
  std::size_t n_documents_ = 0;
};

/// Ids in first-occurrence order; df counts distinct documents. Throws
/// ValidationError on an empty document list.
Vocabulary build_vocabulary(const std::vector<Tokens>& docs);

/// Sparse vector sorted by term id with no zero entries.
struct TermVector {
  std::vector<std::pair<TermId, double>> entries;
  std::size_t length_tokens = 0;

  bool empty() const { return entries.empty(); }
  double weight(TermId id) const;
  double total() const;
  double norm() const;
};

/// Raw counts of in-vocabulary tokens. length_tokens is tokens.size() unless
/// an explicit sentence length is supplied.
TermVector vectorize_counts(const Tokens& tokens, const Vocabulary& vocab);
TermVector vectorize_counts(const Tokens& tokens, const Vocabulary& vocab,
                            std::size_t length_tokens);

/// weight = count * ln(N / df); ubiquitous terms drop out.
TermVector tfidf_transform(const TermVector& counts, const Vocabulary& vocab,
                           bool l2_normalize = true);

double dot(const TermVector& v, const std::vector<double>& dense);

}  // namespace qinu
