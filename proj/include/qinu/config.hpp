#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qinu/classifiers.hpp"
#include "qinu/corpus.hpp"
#include "qinu/polarity.hpp"
#include "qinu/similarity.hpp"
#include "qinu/text_pipeline.hpp"

namespace qinu {

/// Everything a pipeline run depends on. Missing keys take defaults; unknown
/// keys are rejected so that typos never silently change a run.
struct ProjectConfig {
  PipelineConfig pipeline;
  // Stopword list provenance; the resolved list lands in pipeline.stopwords.
  std::optional<std::vector<std::string>> stopword_list;
  std::optional<std::string> stopwords_file;
  SegmentationConfig segmentation;
  SentenceSimParams similarity;
  std::optional<std::string> taxonomy_file;  // relative to the project root
  std::optional<std::string> ngram_file;
  ClassifierHyper classifiers;
  QinUWeights weights;
  std::uint64_t seed = 42;

  void validate() const;
};

nlohmann::json config_to_json(const ProjectConfig& c);
/// base_dir resolves a relative stopwords_file.
ProjectConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});

/// Reads <root>/config.json; a missing file yields the defaults.
ProjectConfig load_project_config(const std::filesystem::path& root);
void save_project_config(const ProjectConfig& c, const std::filesystem::path& root);

/// 16 hex digits of FNV-1a over the canonical JSON dump.
std::string config_hash(const ProjectConfig& c);

/// Loads the taxonomy/ngram files named in the config, if any.
std::shared_ptr<const Taxonomy> load_config_taxonomy(const ProjectConfig& c, const std::filesystem::path& root);
std::shared_ptr<const NgramTable> load_config_ngrams(const ProjectConfig& c, const std::filesystem::path& root);

}  // namespace qinu
