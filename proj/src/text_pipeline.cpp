#include "qinu/text_pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include "qinu/types.hpp"

namespace qinu {

namespace {

struct CodePoint {
  char32_t value;
  std::size_t length;
};

// Lenient UTF-8 decoder: an invalid lead byte decodes as itself with length 1.
CodePoint decode(std::string_view s, std::size_t i) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  auto cont = [&](std::size_t k) -> int {
    if (i + k >= s.size()) return -1;
    const auto b = static_cast<unsigned char>(s[i + k]);
    return (b & 0xC0) == 0x80 ? (b & 0x3F) : -1;
  };
  if (b0 < 0x80) return {b0, 1};
  if ((b0 & 0xE0) == 0xC0) {
    const int c1 = cont(1);
    if (c1 >= 0) return {static_cast<char32_t>(((b0 & 0x1F) << 6) | c1), 2};
  } else if ((b0 & 0xF0) == 0xE0) {
    const int c1 = cont(1), c2 = cont(2);
    if (c1 >= 0 && c2 >= 0) return {static_cast<char32_t>(((b0 & 0x0F) << 12) | (c1 << 6) | c2), 3};
  } else if ((b0 & 0xF8) == 0xF0) {
    const int c1 = cont(1), c2 = cont(2), c3 = cont(3);
    if (c1 >= 0 && c2 >= 0 && c3 >= 0)
      return {static_cast<char32_t>(((b0 & 0x07) << 18) | (c1 << 12) | (c2 << 6) | c3), 4};
  }
  return {b0, 1};
}

bool is_space(char32_t c) {
  switch (c) {
    case U' ':
    case U'\t':
    case U'\n':
    case U'\v':
    case U'\f':
    case U'\r':
    case 0x85:
    case 0xA0:
    case 0x1680:
    case 0x2028:
    case 0x2029:
    case 0x202F:
    case 0x205F:
    case 0x3000:
      return true;
    default:
      return c >= 0x2000 && c <= 0x200A;
  }
}

bool is_punct(char32_t c) {
  if (c < 0x80) {
    return (c >= 0x21 && c <= 0x2F) || (c >= 0x3A && c <= 0x40) || (c >= 0x5B && c <= 0x60) ||
           (c >= 0x7B && c <= 0x7E);
  }
  return c == 0xA1 || c == 0xAB || c == 0xBB || c == 0xBF || (c >= 0x2010 && c <= 0x2027) ||
         (c >= 0x2030 && c <= 0x205E) || (c >= 0x3001 && c <= 0x3003);
}

std::vector<std::string_view> split_whitespace(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  std::size_t start = std::string_view::npos;
  while (i < text.size()) {
    const CodePoint cp = decode(text, i);
    if (is_space(cp.value)) {
      if (start != std::string_view::npos) {
        out.push_back(text.substr(start, i - start));
        start = std::string_view::npos;
      }
    } else if (start == std::string_view::npos) {
      start = i;
    }
    i += cp.length;
  }
  if (start != std::string_view::npos) out.push_back(text.substr(start));
  return out;
}

std::string_view strip_edges(std::string_view tok) {
  // Leading punctuation.
  while (!tok.empty()) {
    const CodePoint cp = decode(tok, 0);
    if (!is_punct(cp.value)) break;
    tok.remove_prefix(cp.length);
  }
  // Trailing punctuation: find the start of the last code point each time.
  while (!tok.empty()) {
    std::size_t j = tok.size() - 1;
    while (j > 0 && (static_cast<unsigned char>(tok[j]) & 0xC0) == 0x80) --j;
    const CodePoint cp = decode(tok, j);
    if (j + cp.length != tok.size() || !is_punct(cp.value)) break;
    tok.remove_suffix(tok.size() - j);
  }
  return tok;
}

std::size_t code_point_count(std::string_view s) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < s.size();) {
    i += decode(s, i).length;
    ++n;
  }
  return n;
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

// Shared front half of tokenize / count_length_tokens.
std::vector<std::string> normalized_tokens(std::string_view text, const PipelineConfig& config) {
  std::vector<std::string> out;
  for (std::string_view raw : split_whitespace(text)) {
    std::string_view tok = config.strip_punctuation ? strip_edges(raw) : raw;
    if (tok.empty()) continue;
    out.push_back(config.lowercase ? ascii_lower(tok) : std::string(tok));
  }
  return out;
}

}  // namespace

const std::unordered_set<std::string>& default_stopwords() {
  static const std::unordered_set<std::string> words = {
      "a",     "an",    "the",   "this",  "that",  "these", "those", "is",    "are",   "was",
      "were",  "be",    "been",  "being", "am",    "it",    "its",   "i",     "me",    "my",
      "we",    "our",   "you",   "your",  "he",    "she",   "they",  "them",  "their", "and",
      "or",    "but",   "if",    "of",    "at",    "by",    "for",   "with",  "to",    "from",
      "in",    "on",    "as",    "so",    "than",  "then",  "there", "here",  "has",   "have",
      "had",   "do",    "does",  "did",   "will",  "would", "can",   "could", "should", "just",
      "about", "into",  "also",  "all",   "any",   "each",  "which", "who",   "what",  "when",
      "where", "how",   "s",     "im",    "i'm",   "it's",  "i've",  "one",   "got",   "get"};
  return words;
}

void PipelineConfig::validate() const {
  if (min_token_len < 1) throw ValidationError("pipeline.min_token_len must be >= 1");
}

std::unordered_set<std::string> load_stopwords(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read stopword file '" + path + "'");
  std::unordered_set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto parts = split_whitespace(line);
    if (!parts.empty()) words.emplace(parts.front());
  }
  return words;
}

Tokens tokenize(std::string_view text, const PipelineConfig& config) {
  Tokens out;
  for (std::string& tok : normalized_tokens(text, config)) {
    const bool stop = config.lowercase ? config.stopwords.contains(tok)
                                       : config.stopwords.contains(ascii_lower(tok));
    if (stop) continue;
    if (code_point_count(tok) < config.min_token_len) continue;
    out.push_back(std::move(tok));
  }
  return out;
}

std::size_t count_length_tokens(std::string_view text, const PipelineConfig& config) {
  return normalized_tokens(text, config).size();
}

TermId Vocabulary::find(std::string_view term) const {
  auto it = index_.find(term);
  return it == index_.end() ? terms_.size() : it->second;
}

Vocabulary Vocabulary::from_parts(std::vector<std::string> terms, std::vector<std::size_t> df,
                                  std::size_t n_documents) {
  if (terms.size() != df.size())
    throw ValidationError("vocabulary terms and document frequencies differ in length");
  Vocabulary v;
  v.n_documents_ = n_documents;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (df[i] > n_documents) throw ValidationError("vocabulary df exceeds n_documents");
    if (!v.index_.emplace(terms[i], i).second)
      throw ValidationError("duplicate vocabulary term '" + terms[i] + "'");
  }
  v.terms_ = std::move(terms);
  v.df_ = std::move(df);
  return v;
}

Vocabulary build_vocabulary(const std::vector<Tokens>& docs) {
  if (docs.empty()) throw ValidationError("cannot build a vocabulary from zero documents");
  Vocabulary v;
  v.n_documents_ = docs.size();
  std::vector<std::size_t> last_seen;  // last document index that counted the term
  for (std::size_t d = 0; d < docs.size(); ++d) {
    for (const std::string& tok : docs[d]) {
      auto [it, inserted] = v.index_.emplace(tok, v.terms_.size());
      if (inserted) {
        v.terms_.push_back(tok);
        v.df_.push_back(0);
        last_seen.push_back(docs.size());
      }
      const TermId id = it->second;
      if (last_seen[id] != d) {
        last_seen[id] = d;
        ++v.df_[id];
      }
    }
  }
  return v;
}

double TermVector::weight(TermId id) const {
  auto it = std::lower_bound(entries.begin(), entries.end(), id,
                             [](const auto& e, TermId key) { return e.first < key; });
  return (it != entries.end() && it->first == id) ? it->second : 0.0;
}

double TermVector::total() const {
  double s = 0.0;
  for (const auto& [id, w] : entries) s += w;
  return s;
}

double TermVector::norm() const {
  double s = 0.0;
  for (const auto& [id, w] : entries) s += w * w;
  return std::sqrt(s);
}

TermVector vectorize_counts(const Tokens& tokens, const Vocabulary& vocab) {
  return vectorize_counts(tokens, vocab, tokens.size());
}

TermVector vectorize_counts(const Tokens& tokens, const Vocabulary& vocab,
                            std::size_t length_tokens) {
  std::map<TermId, double> counts;
  for (const std::string& tok : tokens) {
    const TermId id = vocab.find(tok);
    if (id != vocab.size()) counts[id] += 1.0;
  }
  TermVector v;
  v.entries.assign(counts.begin(), counts.end());
  v.length_tokens = std::max(length_tokens, v.entries.size());
  return v;
}

TermVector tfidf_transform(const TermVector& counts, const Vocabulary& vocab, bool l2_normalize) {
  TermVector out;
  out.length_tokens = counts.length_tokens;
  const double n = static_cast<double>(vocab.n_documents());
  for (const auto& [id, count] : counts.entries) {
    const std::size_t df = vocab.document_frequency(id);
    if (df == 0 || df >= vocab.n_documents()) continue;
    const double w = count * std::log(n / static_cast<double>(df));
    if (w != 0.0 && std::isfinite(w)) out.entries.emplace_back(id, w);
  }
  if (l2_normalize) {
    const double nrm = out.norm();
    if (nrm > 0.0) {
      for (auto& e : out.entries) e.second /= nrm;
    }
  }
  return out;
}

double dot(const TermVector& v, const std::vector<double>& dense) {
  double s = 0.0;
  for (const auto& [id, w] : v.entries) {
    if (id < dense.size()) s += w * dense[id];
  }
  return s;
}

}  // namespace qinu
