#include "qinu/cli.hpp"

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "qinu/classifiers.hpp"
#include "qinu/config.hpp"
#include "qinu/corpus.hpp"
#include "qinu/evaluation.hpp"
#include "qinu/fixture.hpp"
#include "qinu/polarity.hpp"
#include "qinu/service.hpp"

namespace qinu {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

volatile std::sig_atomic_t g_stop_requested = 0;
extern "C" void on_stop_signal(int) { g_stop_requested = 1; }

void write_file(const fs::path& path, const std::string& text) {
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

fs::path resolve_root(const std::string& flag) {
  if (const char* env = std::getenv("QINU_PROJECT"); env != nullptr && *env != '\0') return env;
  if (flag.empty()) throw UsageError("no project given: pass --project DIR or set QINU_PROJECT");
  return flag;
}

struct Context {
  std::ostream& out;
  std::ostream& err;
  fs::path root;
  ProjectConfig config;
  std::string hash;
};

Context make_context(const fs::path& root, std::ostream& out, std::ostream& err) {
  Context ctx{out, err, root, load_project_config(root), ""};
  ctx.hash = config_hash(ctx.config);
  out << "config " << ctx.hash << "\n";
  return ctx;
}

void require_project(const fs::path& root) {
  if (!fs::exists(root / ProjectStore::kReviewsFile))
    throw NotFoundError("no project at '" + root.string() + "'; run 'qinu init --project " + root.string() +
                        "' first");
}

fs::path model_path(const Context& ctx, ClassifierKind kind) {
  return ctx.root / "models" / (std::string(to_string(kind)) + ".json");
}

fs::path lexicon_path(const Context& ctx) { return ctx.root / "models" / "lexicon.json"; }

LabeledDataset load_gold(const Context& ctx, const ProjectStore& store) {
  GoldExport g = export_gold(store, ctx.config.pipeline);
  for (const std::string& w : g.warnings) ctx.err << "warning: " << w << "\n";
  if (g.dropped_conflicts > 0)
    ctx.err << "warning: " << g.dropped_conflicts << " sentences dropped for tied annotator topics\n";
  return std::move(g.records);
}

ClassifierHyper hyper_for(const Context& ctx, std::uint64_t seed) {
  ClassifierHyper h = ctx.config.classifiers;
  h.similarity = ctx.config.similarity;
  h.svm.seed = seed;
  return h;
}

ClassifierModel load_trained_model(const Context& ctx, ClassifierKind kind, const std::string& explicit_path) {
  const fs::path p = explicit_path.empty() ? model_path(ctx, kind) : fs::path(explicit_path);
  if (!fs::exists(p))
    throw NotFoundError("no trained model at " + p.string() + "; run 'qinu train --classifier " +
                        std::string(to_string(kind)) + "' first");
  return load_model(p.string());
}

PolarityLexicon load_lexicon(const fs::path& p) {
  if (!fs::exists(p)) throw NotFoundError("no polarity lexicon at " + p.string() + "; run 'qinu train' first");
  return lexicon_from_json(read_json_file(p));
}

QinUWeights resolve_weights(const Context& ctx, const std::string& flag) {
  if (flag.empty()) return ctx.config.weights;
  try {
    return parse_weights(flag);
  } catch (const ValidationError& e) {
    throw UsageError(e.what());
  }
}

struct ScoreOutcome {
  ClassifierKind kind = ClassifierKind::NaiveBayes;
  QinUReport overall;
  std::vector<QinUReport> products;
};

ScoreOutcome score_project(const Context& ctx, const StoreSnapshot& snap, const ClassifierModel& model,
                           const PolarityLexicon& lexicon, const QinUWeights& weights) {
  std::vector<Tokens> tokens;
  std::vector<std::string> products;
  for (const Sentence& s : snap.sentences()) {
    tokens.push_back(tokenize(s.text, ctx.config.pipeline));
    const Review* r = snap.find_review(s.review_id);
    products.push_back(r ? r->product_id : std::string());
  }
  if (tokens.empty()) throw ValidationError("project has no sentences; run 'qinu segment' first");
  const auto preds = predict_all(model, tokens);
  std::vector<ClassifiedSentence> all;
  std::map<std::string, std::vector<ClassifiedSentence>> by_product;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    ClassifiedSentence c{preds[i].topic, score_polarity(tokens[i], lexicon)};
    all.push_back(c);
    by_product[products[i]].push_back(c);
  }
  auto make = [&](const std::string& id, const std::vector<ClassifiedSentence>& v) {
    QinUReport r = qinu_score(characteristic_scores(v), weights);
    r.product_id = id;
    r.sentences_total = v.size();
    r.sentences_other = static_cast<std::size_t>(
        std::count_if(v.begin(), v.end(), [](const ClassifiedSentence& c) { return c.topic == Topic::Other; }));
    return r;
  };
  ScoreOutcome outcome;
  outcome.kind = kind_of(model);
  outcome.overall = make("", all);
  for (const auto& [id, v] : by_product) outcome.products.push_back(make(id, v));
  return outcome;
}

json score_to_json(const Context& ctx, const ScoreOutcome& s) {
  json products = json::array();
  for (const QinUReport& r : s.products) products.push_back(report_to_json(r));
  return json{{"classifier", to_string(s.kind)},
              {"config_hash", ctx.hash},
              {"overall", report_to_json(s.overall)},
              {"products", std::move(products)}};
}

std::string render_score(const ScoreOutcome& s) {
  std::string text = "Topic classifier: " + std::string(to_string(s.kind)) + "\n\n" + render_report(s.overall);
  for (const QinUReport& r : s.products) text += "\n" + render_report(r);
  return text;
}

std::string render_keywords(const KeywordRanking& k) {
  std::ostringstream os;
  os << "Top topic keywords\n";
  for (const auto& [topic, list] : k.per_topic) {
    os << "  " << std::left << std::setw(18) << to_string(topic) << std::right;
    for (const auto& [w, c] : list) os << " " << w << "(" << c << ")";
    os << "\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------

int cmd_init(const fs::path& root, const std::string& taxonomy, const std::string& ngrams,
             std::optional<std::uint64_t> seed, std::ostream& out, std::ostream& err) {
  ProjectStore store = ProjectStore::create(root);
  ProjectLock lock(root);
  const bool had_config = fs::exists(root / ProjectStore::kConfigFile);
  ProjectConfig config = load_project_config(root);
  bool changed = !had_config;
  auto import_file = [&](const std::string& src, const char* name, std::optional<std::string>& slot) {
    if (src.empty()) return;
    std::error_code ec;
    fs::copy_file(src, root / name, fs::copy_options::overwrite_existing, ec);
    if (ec) throw IoError("cannot copy " + src + " into the project: " + ec.message());
    slot = name;
    changed = true;
  };
  import_file(taxonomy, "taxonomy.json", config.taxonomy_file);
  import_file(ngrams, "ngrams.json", config.ngram_file);
  if (seed) {
    config.seed = *seed;
    changed = true;
  }
  if (changed) {
    // Round-trip so that the written file is exactly what later runs load.
    config = config_from_json(config_to_json(config), root);
    save_project_config(config, root);
  }
  // Fail early if the imported knowledge files are malformed.
  load_config_taxonomy(config, root);
  load_config_ngrams(config, root);
  out << "config " << config_hash(config) << "\n";
  out << "initialized project at " << root.string() << "\n";
  (void)err;
  return 0;
}

int cmd_ingest(Context& ctx, ProjectStore& store, const std::string& input, bool strict) {
  const IngestResult r = ingest_reviews(input, store, strict);
  for (const LineWarning& w : r.warnings) ctx.err << "warning: line " << w.line << ": " << w.message << "\n";
  ctx.out << "ingested " << r.added << " new reviews (" << r.duplicates << " duplicates skipped, "
          << r.warnings.size() << " invalid records)\n";
  return 0;
}

int cmd_sample(Context& ctx, ProjectStore& store, int per_star) {
  const auto ids = sample_balanced(store, per_star);
  const auto snap = store.snapshot();
  std::array<std::size_t, 5> per{};
  for (const std::string& id : ids) ++per[static_cast<std::size_t>(snap->find_review(id)->stars - 1)];
  ctx.out << "selected " << ids.size() << " reviews (per star:";
  for (std::size_t s = 0; s < 5; ++s) ctx.out << " " << s + 1 << "=" << per[s];
  ctx.out << ")\n";
  return 0;
}

int cmd_segment(Context& ctx, ProjectStore& store) {
  const SegmentResult r = segment_store(store, ctx.config.segmentation);
  ctx.out << "segmented " << r.reviews_segmented << " reviews into " << r.sentences_added << " sentences ("
          << r.flagged << " flagged for manual splitting)\n";
  return 0;
}

int cmd_import_gold(Context& ctx, ProjectStore& store, const std::string& input) {
  std::ifstream in(input);
  if (!in) throw IoError("cannot read annotation file '" + input + "'");
  std::vector<Annotation> parsed;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      parsed.push_back(json::parse(line).get<Annotation>());
    } catch (const std::exception& e) {
      throw ValidationError(input + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  std::size_t n = 0;
  for (const Annotation& a : parsed) {
    try {
      record_annotation(a, store, ctx.config.pipeline);
    } catch (const Error& e) {
      throw ValidationError(input + ": annotation " + std::to_string(n + 1) + " (" + a.sentence_id +
                            "): " + e.what() + "; " + std::to_string(n) + " annotations were stored");
    }
    ++n;
  }
  ctx.out << "imported " << n << " annotations\n";
  return 0;
}

int cmd_annotate(Context& ctx, ProjectStore& store, bool serve, const std::string& host, int port,
                 const std::string& static_dir) {
  if (!serve) {
    const auto snap = store.snapshot();
    ctx.out << "annotated " << snap->annotated_sentence_count() << " of " << snap->sentences().size()
            << " sentences; run 'qinu annotate --serve' to open the annotation API\n";
    return 0;
  }
  ServiceOptions opts;
  opts.host = host;
  opts.port = port;
  if (!static_dir.empty()) opts.static_dir = fs::path(static_dir);
  AnnotationService service(store, ctx.config.pipeline, ctx.config.segmentation.max_tokens, opts);
  ctx.out << "serving annotation API on http://" << host << ":" << service.port() << "/ (Ctrl-C to stop)\n"
          << std::flush;
  g_stop_requested = 0;
  auto old_int = std::signal(SIGINT, on_stop_signal);
  auto old_term = std::signal(SIGTERM, on_stop_signal);
  std::thread worker([&] { service.run(); });
  while (g_stop_requested == 0) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  service.stop();
  worker.join();
  std::signal(SIGINT, old_int);
  std::signal(SIGTERM, old_term);
  ctx.out << "service stopped\n";
  return 0;
}

int cmd_train(Context& ctx, ProjectStore& store, ClassifierKind kind) {
  const LabeledDataset data = load_gold(ctx, store);
  const ClassifierModel model =
      train_classifier(kind, data, hyper_for(ctx, ctx.config.seed), load_config_taxonomy(ctx.config, ctx.root),
                       load_config_ngrams(ctx.config, ctx.root));
  std::error_code ec;
  fs::create_directories(model_path(ctx, kind).parent_path(), ec);
  save_model(model, model_path(ctx, kind).string());
  const LexiconBuild lex = build_lexicon(data);
  for (const std::string& w : lex.warnings) ctx.err << "warning: " << w << "\n";
  write_file(lexicon_path(ctx), lexicon_to_json(lex.lexicon).dump(1) + "\n");
  ctx.out << "trained " << to_string(kind) << " on " << data.size() << " gold sentences -> models/"
          << to_string(kind) << ".json\n";
  ctx.out << "polarity lexicon with " << lex.lexicon.scores.size() << " words -> models/lexicon.json\n";
  return 0;
}

int cmd_classify(std::ostream& out, const PipelineConfig& pipeline, const std::string& input,
                 const std::string& model_file, const std::string& lexicon_file) {
  const ClassifierModel model = load_model(model_file);
  std::optional<PolarityLexicon> lexicon;
  fs::path lex = lexicon_file.empty() ? fs::path(model_file).parent_path() / "lexicon.json" : fs::path(lexicon_file);
  if (!lexicon_file.empty() || fs::exists(lex)) lexicon = load_lexicon(lex);
  std::ifstream in(input);
  if (!in) throw IoError("cannot read input file '" + input + "'");
  std::vector<std::string> texts;
  std::vector<Tokens> tokens;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    texts.push_back(line);
    tokens.push_back(tokenize(line, pipeline));
  }
  const auto preds = predict_all(model, tokens);
  for (std::size_t i = 0; i < texts.size(); ++i) {
    json scores = json::object();
    for (Topic t : kAllTopics) {
      const double s = preds[i].scores[index_of(t)];
      scores[std::string(to_string(t))] = std::isfinite(s) ? json(s) : json(nullptr);
    }
    json row{{"text", texts[i]}, {"topic", to_string(preds[i].topic)}, {"scores", std::move(scores)}};
    if (lexicon) {
      const SentencePolarity p = score_polarity(tokens[i], *lexicon);
      row["polarity"] = to_string(p.label);
      row["polarity_score"] = p.score;
    }
    out << row.dump() << "\n";
  }
  return 0;
}

int cmd_score(Context& ctx, ProjectStore& store, ClassifierKind kind, const std::string& model_file,
              const std::string& weights_flag) {
  const QinUWeights weights = resolve_weights(ctx, weights_flag);
  const ClassifierModel model = load_trained_model(ctx, kind, model_file);
  const PolarityLexicon lexicon = load_lexicon(lexicon_path(ctx));
  const ScoreOutcome s = score_project(ctx, *store.snapshot(), model, lexicon, weights);
  write_file(ctx.root / "reports" / "score.json", score_to_json(ctx, s).dump(2) + "\n");
  const std::string text = render_score(s);
  write_file(ctx.root / "reports" / "score.txt", text);
  ctx.out << text << "wrote reports/score.json and reports/score.txt\n";
  return 0;
}

int cmd_evaluate(Context& ctx, ProjectStore& store, const std::string& which, std::size_t folds,
                 std::optional<std::uint64_t> seed_flag) {
  std::vector<ClassifierKind> kinds;
  if (which == "all") {
    kinds.assign(kAllClassifiers.begin(), kAllClassifiers.end());
  } else {
    kinds.push_back(parse_classifier(which));
  }
  const std::uint64_t seed = seed_flag.value_or(ctx.config.seed);
  const LabeledDataset data = load_gold(ctx, store);
  EvalConfig cfg;
  cfg.hyper = hyper_for(ctx, seed);
  cfg.taxonomy = load_config_taxonomy(ctx.config, ctx.root);
  cfg.ngrams = load_config_ngrams(ctx.config, ctx.root);
  cfg.config_hash = ctx.hash;
  for (ClassifierKind kind : kinds) {
    const EvalReport r = cross_validate(data, kind, folds, seed, cfg);
    const std::string name = "eval-" + std::string(to_string(kind));
    write_file(ctx.root / "reports" / (name + ".json"), eval_report_to_json(r).dump(2) + "\n");
    const std::string text = render_eval_report(r);
    write_file(ctx.root / "reports" / (name + ".txt"), text);
    ctx.out << text << "wrote reports/" << name << ".json and reports/" << name << ".txt\n";
  }
  return 0;
}

int cmd_keywords(Context& ctx, ProjectStore& store, std::size_t top) {
  if (top < 1) throw UsageError("--top must be >= 1");
  const KeywordRanking k = top_keywords(load_gold(ctx, store), top);
  write_file(ctx.root / "reports" / "keywords.json", keywords_to_json(k).dump(2) + "\n");
  const std::string text = render_keywords(k);
  write_file(ctx.root / "reports" / "keywords.txt", text);
  ctx.out << text << "wrote reports/keywords.json and reports/keywords.txt\n";
  return 0;
}

int cmd_report(Context& ctx, ProjectStore& store, ClassifierKind kind, const std::string& weights_flag) {
  const auto snap = store.snapshot();
  const QinUWeights weights = resolve_weights(ctx, weights_flag);
  const ClassifierModel model = load_trained_model(ctx, kind, "");
  const PolarityLexicon lexicon = load_lexicon(lexicon_path(ctx));
  const ScoreOutcome s = score_project(ctx, *snap, model, lexicon, weights);

  std::optional<LabeledDataset> gold;
  if (!snap->annotations().empty()) gold = load_gold(ctx, store);

  json evaluation = json::array();
  std::ostringstream eval_text;
  eval_text << std::fixed << std::setprecision(4);
  for (ClassifierKind k : kAllClassifiers) {
    const fs::path p = ctx.root / "reports" / ("eval-" + std::string(to_string(k)) + ".json");
    if (!fs::exists(p)) continue;
    const json e = read_json_file(p);
    const json& m = e.at("pooled").at("metrics");
    evaluation.push_back({{"classifier", e.at("classifier")},
                          {"k", e.at("k")},
                          {"seed", e.at("seed")},
                          {"config_hash", e.at("config_hash")},
                          {"macro_f1", m.at("macro_f1")},
                          {"accuracy", m.at("accuracy")},
                          {"macro_auc", m.at("macro_auc")}});
    eval_text << "  " << std::left << std::setw(8) << e.at("classifier").get<std::string>() << std::right
              << " macro-F1=" << m.at("macro_f1").get<double>() << " accuracy=" << m.at("accuracy").get<double>()
              << " (k=" << e.at("k").get<std::size_t>() << ", seed=" << e.at("seed").get<std::uint64_t>() << ")\n";
  }

  json project{{"reviews", snap->reviews().size()},
               {"selected_reviews", snap->selection().size()},
               {"sentences", snap->sentences().size()},
               {"annotated_sentences", snap->annotated_sentence_count()},
               {"gold_records", gold ? gold->size() : 0}};
  json report{{"config_hash", ctx.hash}, {"project", project}, {"quality_in_use", score_to_json(ctx, s)},
              {"evaluation", evaluation}};
  std::string keywords_text;
  const bool has_keywords = gold && std::any_of(gold->begin(), gold->end(), [](const GoldRecord& r) {
                              return r.keyword_span.has_value();
                            });
  if (has_keywords) {
    const KeywordRanking k = top_keywords(*gold, 5);
    report["keywords"] = keywords_to_json(k);
    keywords_text = render_keywords(k);
  }
  std::ostringstream text;
  text << "Quality-in-use use case report (config " << ctx.hash << ")\n";
  text << "  reviews: " << snap->reviews().size() << " (" << snap->selection().size() << " selected)\n";
  text << "  sentences: " << snap->sentences().size() << " (" << snap->annotated_sentence_count()
       << " annotated, " << (gold ? gold->size() : 0) << " gold records)\n\n";
  text << render_score(s) << "\n";
  if (!evaluation.empty()) text << "Cross-validated topic classification (pooled)\n" << eval_text.str() << "\n";
  text << keywords_text;
  write_file(ctx.root / "reports" / "report.json", report.dump(2) + "\n");
  write_file(ctx.root / "reports" / "report.txt", text.str());
  ctx.out << text.str() << "wrote reports/report.json and reports/report.txt\n";
  return 0;
}

int cmd_fixture(std::ostream& out, const std::string& output, std::uint64_t seed) {
  FixtureOptions opts;
  opts.seed = seed;
  const ProjectConfig defaults;
  out << "config " << config_hash(defaults) << "\n";
  const Fixture f = generate_fixture(opts, defaults.pipeline);
  write_fixture(f, output);
  out << "wrote fixture to " << output << ": " << f.reviews.size() << " reviews, " << f.sentences.size()
      << " sentences, " << f.annotations.size() << " annotations\n";
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"qinu: quality-in-use prediction from software reviews", "qinu"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string project;
  app.add_option("--project", project, "Project directory (QINU_PROJECT overrides)");

  auto* init = app.add_subcommand("init", "Create a project directory");
  std::string init_taxonomy, init_ngrams;
  std::optional<std::uint64_t> init_seed;
  init->add_option("--taxonomy", init_taxonomy, "Taxonomy JSON to copy into the project")->check(CLI::ExistingFile);
  init->add_option("--ngrams", init_ngrams, "N-gram table JSON to copy into the project")->check(CLI::ExistingFile);
  init->add_option("--seed", init_seed, "Project seed");

  auto* ingest = app.add_subcommand("ingest", "Ingest a reviews JSONL file");
  std::string ingest_input;
  bool ingest_strict = false;
  ingest->add_option("--input", ingest_input, "Reviews JSONL file")->required();
  ingest->add_flag("--strict", ingest_strict, "Abort on the first malformed record");

  auto* sample = app.add_subcommand("sample", "Select the top reviews per star rating");
  int per_star = 10;
  sample->add_option("--per-star", per_star, "Reviews per star value")->capture_default_str();

  auto* segment = app.add_subcommand("segment", "Split selected reviews into sentences");

  auto* annotate = app.add_subcommand("annotate", "Annotation progress, or serve the annotation API");
  bool serve = false;
  int port = 8080;
  std::string host = "127.0.0.1", static_dir;
  annotate->add_flag("--serve", serve, "Run the HTTP annotation service");
  annotate->add_option("--port", port, "Port to listen on")->capture_default_str();
  annotate->add_option("--host", host, "Address to bind")->capture_default_str();
  annotate->add_option("--static", static_dir, "Directory of UI assets served at /");

  auto* import_gold = app.add_subcommand("import-gold", "Record annotations from a JSONL file");
  std::string gold_input;
  import_gold->add_option("--input", gold_input, "Annotations JSONL file")->required();

  auto* train = app.add_subcommand("train", "Train a topic classifier and the polarity lexicon");
  std::string train_kind;
  train->add_option("--classifier", train_kind, "nb, svm, lsa or simsent")->required();

  auto* classify = app.add_subcommand("classify", "Classify sentences from a text file (one per line)");
  std::string classify_input, classify_model, classify_lexicon;
  classify->add_option("--input", classify_input, "Input text file")->required();
  classify->add_option("--model", classify_model, "Model JSON file")->required();
  classify->add_option("--lexicon", classify_lexicon, "Lexicon JSON (default: lexicon.json next to the model)");

  auto* score = app.add_subcommand("score", "Score quality in use over the project's sentences");
  std::string score_weights, score_kind = "nb", score_model;
  score->add_option("--weights", score_weights, "Weights a,b,c for effectiveness, efficiency, freedom from risk");
  score->add_option("--classifier", score_kind, "Trained classifier to use")->capture_default_str();
  score->add_option("--model", score_model, "Model file (overrides --classifier)");

  auto* evaluate = app.add_subcommand("evaluate", "Stratified k-fold cross-validation");
  std::string eval_kind;
  std::size_t folds = 3;
  std::optional<std::uint64_t> eval_seed;
  evaluate->add_option("--classifier", eval_kind, "nb, svm, lsa, simsent or all")->required();
  evaluate->add_option("--folds", folds, "Number of folds")->capture_default_str();
  evaluate->add_option("--seed", eval_seed, "Fold and training seed (default: project seed)");

  auto* keywords = app.add_subcommand("keywords", "Top annotated keywords per topic");
  std::size_t top = 5;
  keywords->add_option("--top", top, "Keywords per topic")->capture_default_str();

  auto* report = app.add_subcommand("report", "Write the end-to-end use case report");
  std::string report_kind = "nb", report_weights;
  report->add_option("--classifier", report_kind, "Trained classifier to use")->capture_default_str();
  report->add_option("--weights", report_weights, "Weights a,b,c");

  auto* fixture = app.add_subcommand("fixture", "Write the synthetic fixture corpus");
  std::string fixture_output;
  std::uint64_t fixture_seed = FixtureOptions{}.seed;
  fixture->add_option("--output", fixture_output, "Output directory")->required();
  fixture->add_option("--seed", fixture_seed, "Generator seed")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << " (see 'qinu --help')\n";
    return 1;
  }
  try {
    if (fixture->parsed()) return cmd_fixture(out, fixture_output, fixture_seed);
    if (classify->parsed() && project.empty() && std::getenv("QINU_PROJECT") == nullptr) {
      const ProjectConfig defaults;
      out << "config " << config_hash(defaults) << "\n";
      return cmd_classify(out, defaults.pipeline, classify_input, classify_model, classify_lexicon);
    }
    const fs::path root = resolve_root(project);
    if (init->parsed()) return cmd_init(root, init_taxonomy, init_ngrams, init_seed, out, err);

    require_project(root);
    ProjectLock lock(root);
    ProjectStore store = ProjectStore::open(root);
    Context ctx = make_context(root, out, err);
    if (ingest->parsed()) return cmd_ingest(ctx, store, ingest_input, ingest_strict);
    if (sample->parsed()) return cmd_sample(ctx, store, per_star);
    if (segment->parsed()) return cmd_segment(ctx, store);
    if (annotate->parsed()) return cmd_annotate(ctx, store, serve, host, port, static_dir);
    if (import_gold->parsed()) return cmd_import_gold(ctx, store, gold_input);
    if (train->parsed()) return cmd_train(ctx, store, parse_classifier(train_kind));
    if (classify->parsed())
      return cmd_classify(out, ctx.config.pipeline, classify_input, classify_model, classify_lexicon);
    if (score->parsed()) return cmd_score(ctx, store, parse_classifier(score_kind), score_model, score_weights);
    if (evaluate->parsed()) return cmd_evaluate(ctx, store, eval_kind, folds, eval_seed);
    if (keywords->parsed()) return cmd_keywords(ctx, store, top);
    if (report->parsed()) return cmd_report(ctx, store, parse_classifier(report_kind), report_weights);
    throw UsageError("unknown command");
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: internal: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace qinu
