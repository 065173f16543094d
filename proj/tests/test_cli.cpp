#include <doctest.h>

#include <cstdlib>
#include <sstream>

#include "qinu/cli.hpp"
#include "test_support.hpp"

using namespace qinu;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

// fixture -> init -> ingest -> sample -> segment -> import-gold
void build_project(const std::filesystem::path& dir) {
  const std::string fx = (dir / "fx").string(), p = (dir / "p").string();
  REQUIRE(run({"fixture", "--output", fx}).code == 0);
  REQUIRE(run({"init", "--project", p, "--taxonomy", fx + "/taxonomy.json", "--ngrams", fx + "/ngrams.json"}).code == 0);
  REQUIRE(run({"--project", p, "ingest", "--input", fx + "/reviews.jsonl"}).code == 0);
  REQUIRE(run({"--project", p, "sample"}).code == 0);
  REQUIRE(run({"--project", p, "segment"}).code == 0);
  REQUIRE(run({"--project", p, "import-gold", "--input", fx + "/annotations.jsonl"}).code == 0);
}

}  // namespace

TEST_CASE("usage errors exit 1") {
  CHECK(run({}).code == 1);  // a subcommand is required
  CHECK(run({"--help"}).code == 0);
  auto r = run({"frobnicate"});
  CHECK(r.code == 1);
  CHECK(r.err.find("error:") == 0);
  CHECK(run({"evaluate"}).code == 1);  // --classifier is required
  CHECK(run({"ingest", "--input", "x", "--bogus"}).code == 1);
}

TEST_CASE("data errors exit 2 with a one-line message") {
  testing::TempDir dir;
  auto r = run({"--project", (dir / "none").string(), "segment"});
  CHECK(r.code == 2);
  CHECK(r.err.find('\n') == r.err.size() - 1);
  CHECK(r.err.find("init") != std::string::npos);  // says how to fix it

  // init is idempotent and reports the same hash.
  const auto first = run({"init", "--project", (dir / "p").string()});
  REQUIRE(first.code == 0);
  CHECK(first.out.find("config ") == 0);
  CHECK(run({"init", "--project", (dir / "p").string()}).out == first.out);
  r = run({"--project", (dir / "p").string(), "ingest", "--input", (dir / "missing.jsonl").string()});
  CHECK(r.code == 2);
  r = run({"--project", (dir / "p").string(), "evaluate", "--classifier", "nb"});
  CHECK(r.code == 2);  // no gold standard yet
}

TEST_CASE("QINU_PROJECT overrides --project") {
  testing::TempDir dir;
  REQUIRE(run({"init", "--project", (dir / "real").string()}).code == 0);
  testing::write_text(dir / "r.jsonl", json(testing::make_review("a", 4, "Fine.")).dump() + "\n");
  ::setenv("QINU_PROJECT", (dir / "real").string().c_str(), 1);
  const auto r = run({"--project", (dir / "decoy").string(), "ingest", "--input", (dir / "r.jsonl").string()});
  ::unsetenv("QINU_PROJECT");
  CHECK(r.code == 0);
  CHECK(std::filesystem::exists(dir / "real" / "reviews.jsonl"));
  CHECK(testing::read_text(dir / "real" / "reviews.jsonl").find("\"a\"") != std::string::npos);
  CHECK_FALSE(std::filesystem::exists(dir / "decoy"));
}

TEST_CASE("full pipeline over the fixture") {
  testing::TempDir dir;
  build_project(dir.path());
  const std::string p = (dir / "p").string();

  auto r = run({"--project", p, "annotate"});
  CHECK(r.code == 0);
  CHECK(r.out.find("annotated 600 of 600") != std::string::npos);

  r = run({"--project", p, "evaluate", "--classifier", "nb", "--folds", "3", "--seed", "7"});
  REQUIRE(r.code == 0);
  const json eval = json::parse(testing::read_text(dir / "p" / "reports" / "eval-nb.json"));
  CHECK(eval["k"] == 3);
  CHECK(eval["seed"] == 7);
  CHECK(eval["pooled"]["metrics"]["macro_f1"].get<double>() >= 0.8);

  r = run({"--project", p, "keywords", "--top", "5"});
  REQUIRE(r.code == 0);
  const json kw = json::parse(testing::read_text(dir / "p" / "reports" / "keywords.json"));
  for (const char* t : {"effectiveness", "efficiency", "freedom_from_risk"}) CHECK(kw[t].size() == 5);

  r = run({"--project", p, "score", "--weights", "0.5,0.5,0.2"});
  CHECK(r.code == 1);
  CHECK(r.err.find("weights must sum to 1") != std::string::npos);
  CHECK(run({"--project", p, "score"}).code == 2);  // no model trained yet

  REQUIRE(run({"--project", p, "train", "--classifier", "nb"}).code == 0);
  REQUIRE(run({"--project", p, "score", "--weights", "0.4,0.3,0.3"}).code == 0);
  const json score = json::parse(testing::read_text(dir / "p" / "reports" / "score.json"));
  CHECK(score["overall"]["weights"]["effectiveness"] == 0.4);
  CHECK(score["overall"]["aggregate"].is_number());
  CHECK(score["products"].size() == 2);

  REQUIRE(run({"--project", p, "report"}).code == 0);
  const std::string report = testing::read_text(dir / "p" / "reports" / "report.json");
  CHECK(json::parse(report).contains("quality_in_use"));

  testing::write_text(dir / "in.txt", "The app loads fast.\nIt crashed and I lost my data.\n");
  r = run({"classify", "--input", (dir / "in.txt").string(), "--model", p + "/models/nb.json"});
  REQUIRE(r.code == 0);
  std::istringstream lines(r.out);
  std::string line;
  std::vector<json> rows;
  while (std::getline(lines, line))
    if (!line.empty() && line[0] == '{') rows.push_back(json::parse(line));
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].contains("topic"));
  CHECK(rows[0].contains("polarity"));
}

TEST_CASE("equal config and store give byte-identical reports") {
  testing::TempDir a, b;
  for (auto* d : {&a, &b}) {
    build_project(d->path());
    const std::string p = (d->path() / "p").string();
    REQUIRE(run({"--project", p, "train", "--classifier", "svm"}).code == 0);
    REQUIRE(run({"--project", p, "evaluate", "--classifier", "svm"}).code == 0);
    REQUIRE(run({"--project", p, "report", "--classifier", "svm"}).code == 0);
  }
  for (const char* f : {"reports/eval-svm.json", "reports/eval-svm.txt", "reports/report.json", "reports/report.txt",
                        "models/svm.json"})
    CHECK(testing::read_text(a / "p" / f) == testing::read_text(b / "p" / f));
}
