#include "qinu/polarity.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace qinu {

using nlohmann::json;

std::set<std::string> default_negators() { return {"not", "never", "no", "n't", "without"}; }

std::map<std::string, double> default_intensifiers() {
  return {{"very", 1.5}, {"extremely", 2.0}, {"slightly", 0.5}};
}

bool is_negator(const std::string& token, const std::set<std::string>& negators) {
  if (negators.contains(token)) return true;
  return negators.contains("n't") && token.size() > 3 && token.ends_with("n't");
}

void PolarityLexicon::validate() const {
  for (const auto& [w, s] : scores) {
    if (!(s >= -1.0 && s <= 1.0)) throw ValidationError("lexicon score for '" + w + "' outside [-1,1]");
  }
  for (const auto& [w, m] : intensifiers) {
    if (!(m > 0.0)) throw ValidationError("intensifier multiplier for '" + w + "' must be > 0");
  }
}

json lexicon_to_json(const PolarityLexicon& lex) {
  return json{{"scores", lex.scores}, {"negators", lex.negators}, {"intensifiers", lex.intensifiers}};
}

PolarityLexicon lexicon_from_json(const json& j) {
  PolarityLexicon lex;
  try {
    lex.scores = j.at("scores").get<std::map<std::string, double>>();
    lex.negators = j.at("negators").get<std::set<std::string>>();
    lex.intensifiers = j.at("intensifiers").get<std::map<std::string, double>>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed lexicon: ") + e.what());
  }
  lex.validate();
  return lex;
}

LexiconBuild build_lexicon(const LabeledDataset& gold) {
  LexiconBuild out;
  const PolarityLexicon defaults;
  std::map<std::string, std::pair<double, std::size_t>> votes;  // sum, occurrences
  std::set<std::string> ignored;
  bool any_opinion = false;
  for (const GoldRecord& r : gold) {
    if (!r.opinion_span) continue;
    any_opinion = true;
    bool negated = false;
    if (r.modifier_span) {
      for (std::size_t i = r.modifier_span->start; i < r.modifier_span->end && i < r.tokens.size(); ++i) {
        const std::string& m = r.tokens[i];
        if (is_negator(m, defaults.negators)) {
          negated = true;
        } else if (!defaults.intensifiers.contains(m)) {
          ignored.insert(m);
        }
      }
    }
    if (r.polarity == Polarity::Neutral) continue;
    double vote = r.polarity == Polarity::Positive ? 1.0 : -1.0;
    if (negated) vote = -vote;
    for (std::size_t i = r.opinion_span->start; i < r.opinion_span->end && i < r.tokens.size(); ++i) {
      auto& [sum, n] = votes[r.tokens[i]];
      sum += vote;
      ++n;
    }
  }
  if (!any_opinion) throw ValidationError("gold standard has no opinion spans to build a lexicon from");
  for (const auto& [word, v] : votes) {
    const double s = std::clamp(v.first / static_cast<double>(v.second), -1.0, 1.0);
    if (s != 0.0) out.lexicon.scores[word] = s;
  }
  for (const std::string& w : ignored)
    out.warnings.push_back("modifier '" + w + "' is not a known negator or intensifier; ignored");
  return out;
}

SentencePolarity score_polarity(const Tokens& tokens, const PolarityLexicon& lex) {
  if (lex.empty()) throw ValidationError("polarity lexicon is empty");
  SentencePolarity out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    auto it = lex.scores.find(tokens[i]);
    if (it == lex.scores.end()) continue;
    double s = it->second;
    bool negated = false;
    for (std::size_t back = 1; back <= kModifierWindow && back <= i; ++back) {
      const std::string& prev = tokens[i - back];
      if (auto m = lex.intensifiers.find(prev); m != lex.intensifiers.end()) s *= m->second;
      if (is_negator(prev, lex.negators)) negated = true;
    }
    out.score += negated ? -s : s;
  }
  out.label = out.score > 0.0 ? Polarity::Positive : out.score < 0.0 ? Polarity::Negative : Polarity::Neutral;
  return out;
}

std::vector<CharacteristicScore> characteristic_scores(const std::vector<ClassifiedSentence>& classified) {
  std::vector<CharacteristicScore> out;
  for (Topic t : kScoredTopics) out.push_back({t, 0, 0, 0, std::nullopt});
  for (const ClassifiedSentence& c : classified) {
    if (c.topic == Topic::Other) continue;
    CharacteristicScore& cs = out[index_of(c.topic)];
    switch (c.polarity.label) {
      case Polarity::Positive:
        ++cs.n_pos;
        break;
      case Polarity::Negative:
        ++cs.n_neg;
        break;
      case Polarity::Neutral:
        ++cs.n_neutral;
        break;
    }
  }
  for (CharacteristicScore& cs : out) {
    if (cs.n_pos + cs.n_neg > 0)
      cs.score = static_cast<double>(cs.n_pos) / static_cast<double>(cs.n_pos + cs.n_neg);
  }
  return out;
}

double QinUWeights::of(Topic t) const {
  switch (t) {
    case Topic::Effectiveness:
      return effectiveness;
    case Topic::Efficiency:
      return efficiency;
    case Topic::FreedomFromRisk:
      return freedom_from_risk;
    case Topic::Other:
      break;
  }
  return 0.0;
}

void QinUWeights::validate() const {
  for (double w : {effectiveness, efficiency, freedom_from_risk}) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ValidationError("weights must be non-negative");
  }
  if (std::abs(effectiveness + efficiency + freedom_from_risk - 1.0) > 1e-9)
    throw ValidationError("weights must sum to 1");
}

QinUWeights parse_weights(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(part, &used));
      if (part.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw UsageError("malformed weight '" + part + "' (expected three numbers like 0.4,0.3,0.3)");
    }
  }
  if (values.size() != 3) throw UsageError("--weights needs exactly three comma-separated numbers");
  QinUWeights w{values[0], values[1], values[2]};
  w.validate();
  return w;
}

const std::vector<CharacteristicDefinition>& characteristic_definitions() {
  static const std::vector<CharacteristicDefinition> defs = {
      {"effectiveness", "How accurately and completely users reach their intended goals.", true},
      {"efficiency", "Resources used relative to how accurately and completely users reach their goals.", true},
      {"freedom_from_risk",
       "How well the product limits potential harm to users' finances, health, safety or environment.", true},
      {"satisfaction", "How well the product meets user needs in the intended context of use.", false},
      {"context_coverage",
       "How far the other characteristics hold both in the intended contexts of use and beyond them.", false},
  };
  return defs;
}

QinUReport qinu_score(const std::vector<CharacteristicScore>& chars, const QinUWeights& w) {
  w.validate();
  QinUReport report;
  report.characteristics = chars;
  report.weights = w;
  double mass = 0.0;
  double total = 0.0;
  double lo = 1.0, hi = 0.0;
  bool any = false;
  for (const CharacteristicScore& c : chars) {
    if (!c.score) continue;
    any = true;
    mass += w.of(c.topic);
    total += w.of(c.topic) * *c.score;
    lo = std::min(lo, *c.score);
    hi = std::max(hi, *c.score);
  }
  // Zero weight mass over the defined subset leaves nothing to renormalize.
  if (any && mass > 0.0) report.aggregate = std::clamp(total / mass, lo, hi);
  return report;
}

json report_to_json(const QinUReport& report) {
  json chars = json::array();
  for (const CharacteristicScore& c : report.characteristics) {
    chars.push_back({{"characteristic", to_string(c.topic)},
                     {"n_pos", c.n_pos},
                     {"n_neg", c.n_neg},
                     {"n_neutral", c.n_neutral},
                     {"score", c.score ? json(*c.score) : json(nullptr)}});
  }
  json defs = json::array();
  for (const auto& d : characteristic_definitions())
    defs.push_back({{"name", d.name}, {"definition", d.definition}, {"status", d.measured ? "measured" : "not measured"}});
  return json{{"product_id", report.product_id},
              {"characteristics", std::move(chars)},
              {"aggregate", report.aggregate ? json(*report.aggregate) : json(nullptr)},
              {"sentences", {{"total", report.sentences_total}, {"other", report.sentences_other}}},
              {"weights",
               {{"effectiveness", report.weights.effectiveness},
                {"efficiency", report.weights.efficiency},
                {"freedom_from_risk", report.weights.freedom_from_risk}}},
              {"definitions", std::move(defs)}};
}

std::string render_report(const QinUReport& report) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4);
  os << "Quality-in-use report: " << (report.product_id.empty() ? "(all products)" : report.product_id)
     << "\n";
  os << "  sentences: " << report.sentences_total << " (" << report.sentences_other
     << " off-topic, excluded)\n";
  for (const CharacteristicScore& c : report.characteristics) {
    os << "  " << std::left << std::setw(18) << to_string(c.topic) << std::right << " ";
    if (c.score) {
      os << *c.score;
    } else {
      os << "undefined";
    }
    os << "  (+" << c.n_pos << " / -" << c.n_neg << " / =" << c.n_neutral << ", weight "
       << report.weights.of(c.topic) << ")\n";
  }
  os << "  " << std::left << std::setw(18) << "aggregate" << std::right << " ";
  if (report.aggregate) {
    os << *report.aggregate << "\n";
  } else {
    os << "undefined\n";
  }
  os << "  satisfaction: not measured\n  context_coverage: not measured\n";
  return os.str();
}

}  // namespace qinu
