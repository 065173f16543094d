#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "qinu/corpus.hpp"
#include "qinu/types.hpp"

namespace qinu {

std::set<std::string> default_negators();
std::map<std::string, double> default_intensifiers();

/// True for a listed negator or any token ending in "n't".
bool is_negator(const std::string& token, const std::set<std::string>& negators);

struct PolarityLexicon {
  std::map<std::string, double> scores;  // each in [-1, 1], nonzero
  std::set<std::string> negators = default_negators();
  std::map<std::string, double> intensifiers = default_intensifiers();

  bool empty() const { return scores.empty(); }
  void validate() const;
};

nlohmann::json lexicon_to_json(const PolarityLexicon& lex);
PolarityLexicon lexicon_from_json(const nlohmann::json& j);

struct LexiconBuild {
  PolarityLexicon lexicon;
  std::vector<std::string> warnings;  // ignored modifier words
};

/// Vote-averaged opinion words from annotated gold sentences. A vote is
/// inverted when the sentence's annotated modifier contains a negator.
LexiconBuild build_lexicon(const LabeledDataset& gold);

struct SentencePolarity {
  Polarity label = Polarity::Neutral;
  double score = 0.0;
};

inline constexpr std::size_t kModifierWindow = 3;

/// Sums lexicon scores, scaling by intensifiers and flipping on negators found
/// among the three preceding tokens.
SentencePolarity score_polarity(const Tokens& tokens, const PolarityLexicon& lex);

struct CharacteristicScore {
  Topic topic = Topic::Effectiveness;
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
  std::size_t n_neutral = 0;
  std::optional<double> score;  // n_pos / (n_pos + n_neg)
};

struct ClassifiedSentence {
  Topic topic = Topic::Other;
  SentencePolarity polarity;
};

/// One entry per scored characteristic, in fixed topic order.
std::vector<CharacteristicScore> characteristic_scores(const std::vector<ClassifiedSentence>& classified);

struct QinUWeights {
  double effectiveness = 1.0 / 3.0;
  double efficiency = 1.0 / 3.0;
  double freedom_from_risk = 1.0 / 3.0;

  double of(Topic t) const;
  void validate() const;
};

/// Parses "a,b,c"; throws UsageError on malformed input and
/// ValidationError("weights must sum to 1") on a bad sum.
QinUWeights parse_weights(const std::string& text);

struct CharacteristicDefinition {
  std::string name;
  std::string definition;
  bool measured = false;
};

/// The five quality-in-use characteristics with their standard definitions.
const std::vector<CharacteristicDefinition>& characteristic_definitions();

struct QinUReport {
  std::string product_id;
  std::vector<CharacteristicScore> characteristics;
  std::optional<double> aggregate;
  std::size_t sentences_total = 0;
  std::size_t sentences_other = 0;
  QinUWeights weights;
};

/// Weighted mean of the defined characteristic scores with the weights
/// renormalized over that subset; undefined when none is defined.
QinUReport qinu_score(const std::vector<CharacteristicScore>& chars, const QinUWeights& w);

nlohmann::json report_to_json(const QinUReport& report);
std::string render_report(const QinUReport& report);

}  // namespace qinu
