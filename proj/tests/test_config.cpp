#include <doctest.h>

#include "qinu/config.hpp"
#include "test_support.hpp"

using namespace qinu;
using nlohmann::json;

TEST_CASE("defaults") {
  const ProjectConfig c;
  CHECK(c.seed == 42);
  CHECK(c.similarity.delta == 0.85);
  CHECK(c.similarity.word.alpha == 0.2);
  CHECK(c.similarity.word.beta == 0.45);
  CHECK(c.similarity.order_threshold == 0.4);
  CHECK(c.classifiers.simsent_top_n == 3);
  CHECK_NOTHROW(c.validate());
  CHECK(config_hash(c).size() == 16);
}

TEST_CASE("JSON round trip preserves the hash") {
  ProjectConfig c;
  c.seed = 7;
  c.similarity.backend = SimilarityBackend::Ngram;
  c.classifiers.svm.epochs = 12;
  c.weights = {0.5, 0.25, 0.25};
  c.taxonomy_file = "taxonomy.json";
  const ProjectConfig back = config_from_json(config_to_json(c));
  CHECK(config_to_json(back) == config_to_json(c));
  CHECK(config_hash(back) == config_hash(c));
  CHECK(config_hash(back) != config_hash(ProjectConfig{}));
  // SVM seed follows the project seed.
  CHECK(back.classifiers.svm.seed == 7);
}

TEST_CASE("partial files take defaults; bad files are rejected") {
  CHECK(config_hash(config_from_json(json::object())) == config_hash(ProjectConfig{}));
  CHECK(config_from_json(json{{"seed", 3}}).seed == 3);
  CHECK_THROWS_AS(config_from_json(json{{"sede", 3}}), ValidationError);
  CHECK_THROWS_AS(config_from_json(json{{"similarity", {{"delta", 2.0}}}}), ValidationError);
  CHECK_THROWS_AS(config_from_json(json{{"similarity", {{"backend", "wordnet"}}}}), ValidationError);
  CHECK_THROWS_AS(config_from_json(json{{"seed", "x"}}), ValidationError);
  CHECK_THROWS_AS(config_from_json(json{{"weights", {{"effectiveness", 1}, {"efficiency", 1}, {"freedom_from_risk", 0}}}}),
                  ValidationError);
  CHECK_THROWS_AS(config_from_json(json::array()), ValidationError);
}

TEST_CASE("project files") {
  testing::TempDir dir;
  CHECK(config_hash(load_project_config(dir.path())) == config_hash(ProjectConfig{}));
  ProjectConfig c;
  c.seed = 99;
  save_project_config(c, dir.path());
  CHECK(load_project_config(dir.path()).seed == 99);

  testing::write_text(dir / "stop.txt", "the\nis\n");
  testing::write_text(dir / "config.json", R"({"pipeline": {"stopwords_file": "stop.txt"}})");
  const ProjectConfig s = load_project_config(dir.path());
  CHECK(s.pipeline.stopwords.contains("the"));
  CHECK(s.pipeline.stopwords.size() == 2);
  // The resolved list, not just the file name, feeds the hash.
  const std::string h = config_hash(s);
  testing::write_text(dir / "stop.txt", "the\n");
  CHECK(config_hash(load_project_config(dir.path())) != h);

  testing::write_text(dir / "config.json", "{oops");
  CHECK_THROWS_AS(load_project_config(dir.path()), ValidationError);

  testing::write_text(dir / "config.json", R"({"similarity": {"taxonomy_file": "missing.json"}})");
  const ProjectConfig t = load_project_config(dir.path());
  CHECK_THROWS_AS(load_config_taxonomy(t, dir.path()), IoError);
  CHECK(load_config_ngrams(t, dir.path()) == nullptr);
}
