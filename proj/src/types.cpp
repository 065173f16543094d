#include "qinu/types.hpp"

#include <string>

namespace qinu {

std::string_view to_string(Topic t) {
  switch (t) {
    case Topic::Effectiveness:
      return "effectiveness";
    case Topic::Efficiency:
      return "efficiency";
    case Topic::FreedomFromRisk:
      return "freedom_from_risk";
    case Topic::Other:
      return "other";
  }
  return "other";
}

std::string_view to_string(Polarity p) {
  switch (p) {
    case Polarity::Positive:
      return "positive";
    case Polarity::Negative:
      return "negative";
    case Polarity::Neutral:
      return "neutral";
  }
  return "neutral";
}

Topic parse_topic(std::string_view s) {
  for (Topic t : kAllTopics) {
    if (to_string(t) == s) return t;
  }
  throw ValidationError("unknown topic '" + std::string(s) +
                        "' (expected effectiveness, efficiency, freedom_from_risk or other)");
}

Polarity parse_polarity(std::string_view s) {
  for (Polarity p : {Polarity::Positive, Polarity::Negative, Polarity::Neutral}) {
    if (to_string(p) == s) return p;
  }
  throw ValidationError("unknown polarity '" + std::string(s) +
                        "' (expected positive, negative or neutral)");
}

}  // namespace qinu
