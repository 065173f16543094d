#include <doctest.h>

#include "qinu/types.hpp"

using namespace qinu;

TEST_CASE("topics serialize as lowercase snake strings and round-trip") {
  CHECK(to_string(Topic::FreedomFromRisk) == "freedom_from_risk");
  for (Topic t : kAllTopics) CHECK(parse_topic(to_string(t)) == t);
  for (Polarity p : {Polarity::Positive, Polarity::Negative, Polarity::Neutral})
    CHECK(parse_polarity(to_string(p)) == p);
}

TEST_CASE("unknown labels are validation errors") {
  CHECK_THROWS_AS(parse_topic("Efficiency"), ValidationError);
  CHECK_THROWS_AS(parse_topic("risk"), ValidationError);
  CHECK_THROWS_AS(parse_polarity("mixed"), ValidationError);
}

TEST_CASE("error hierarchy") {
  CHECK_THROWS_AS(throw UsageError("x"), Error);
  CHECK_THROWS_AS(throw ConflictError("x"), Error);
  TokenSpan s{2, 5};
  CHECK(s.size() == 3);
}
