#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qinu {

// Error taxonomy. The CLI maps UsageError to exit code 1 and every other
// qinu::Error to exit code 2; the HTTP service maps them to 4xx codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

class ConflictError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

enum class Topic : int { Effectiveness = 0, Efficiency = 1, FreedomFromRisk = 2, Other = 3 };

inline constexpr std::size_t kTopicCount = 4;

/// Fixed topic order; also the argmax tie-break order.
inline constexpr std::array<Topic, kTopicCount> kAllTopics = {
    Topic::Effectiveness, Topic::Efficiency, Topic::FreedomFromRisk, Topic::Other};

/// The three characteristics that receive a score.
inline constexpr std::array<Topic, 3> kScoredTopics = {Topic::Effectiveness, Topic::Efficiency,
                                                       Topic::FreedomFromRisk};

enum class Polarity : int { Positive = 0, Negative = 1, Neutral = 2 };

inline constexpr std::size_t index_of(Topic t) { return static_cast<std::size_t>(t); }

std::string_view to_string(Topic t);
std::string_view to_string(Polarity p);
Topic parse_topic(std::string_view s);
Polarity parse_polarity(std::string_view s);

/// Half-open token range [start, end).
struct TokenSpan {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - start; }
  bool operator==(const TokenSpan&) const = default;
};

using TopicScores = std::array<double, kTopicCount>;

}  // namespace qinu
