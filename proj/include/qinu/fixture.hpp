#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "qinu/corpus.hpp"
#include "qinu/similarity.hpp"
#include "qinu/text_pipeline.hpp"

namespace qinu {

/// Shape of the synthetic review corpus. The defaults give 60 reviews, of
/// which the 50 most helpful (10 per star) carry 12 annotated sentences each.
struct FixtureOptions {
  std::uint64_t seed = 7;
  std::size_t products = 2;
  std::size_t reviews_per_star = 12;
  std::size_t annotated_per_star = 10;
  std::size_t sentences_per_review = 12;
  std::size_t unannotated_sentences = 6;
  std::string annotator_id = "fixture-annotator";
};

struct Fixture {
  std::vector<Review> reviews;
  std::vector<Sentence> sentences;      // as the default segmenter produces them
  std::vector<Annotation> annotations;  // one per sentence of the annotated reviews
  LabeledDataset gold;                  // sorted by sentence_id
  Taxonomy taxonomy;
  NgramTable ngrams;
};

/// The seeded top keywords per scored topic, most frequent first.
const std::vector<std::string>& fixture_seed_keywords(Topic t);

/// Deterministic for given options. Topic vocabularies are disjoint, so long
/// sentences are easy to classify; about half of the 1-4 token sentences carry
/// only shared words and are ambiguous by construction.
Fixture generate_fixture(const FixtureOptions& options = {}, const PipelineConfig& pipeline = {});

/// Writes reviews.jsonl, annotations.jsonl, gold.jsonl, taxonomy.json and
/// ngrams.json into dir (created if needed).
void write_fixture(const Fixture& fixture, const std::filesystem::path& dir);

}  // namespace qinu
