#include "qinu/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>

namespace qinu {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ValidationError("config: '" + where + "' must be an object");
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items()) {
    (void)v;
    if (!keys.contains(k)) throw ValidationError("config: unknown key '" + where + "." + k + "'");
  }
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ValidationError("config: '" + where + "." + key + "' has the wrong type");
  }
}

std::optional<std::string> read_opt_string(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  if (!j.at(key).is_string()) throw ValidationError("config: '" + where + "." + key + "' must be a string");
  return j.at(key).get<std::string>();
}

json opt(const std::optional<std::string>& s) { return s ? json(*s) : json(nullptr); }

}  // namespace

void ProjectConfig::validate() const {
  pipeline.validate();
  segmentation.validate();
  similarity.validate();
  classifiers.svm.validate();
  if (!(classifiers.nb_smoothing > 0.0)) throw ValidationError("config: classifiers.nb_smoothing must be > 0");
  if (classifiers.simsent_top_n == 0) throw ValidationError("config: classifiers.simsent_top_n must be >= 1");
  if (stopword_list && stopwords_file)
    throw ValidationError("config: give either pipeline.stopwords or pipeline.stopwords_file, not both");
  weights.validate();
}

json config_to_json(const ProjectConfig& c) {
  json stop = nullptr;
  if (c.stopword_list) {
    std::vector<std::string> sorted = *c.stopword_list;
    std::sort(sorted.begin(), sorted.end());
    stop = sorted;
  }
  return json{
      {"pipeline",
       {{"lowercase", c.pipeline.lowercase},
        {"strip_punctuation", c.pipeline.strip_punctuation},
        {"min_token_len", c.pipeline.min_token_len},
        {"stopwords", stop},
        {"stopwords_file", opt(c.stopwords_file)}}},
      {"segmentation", {{"abbreviations", c.segmentation.abbreviations}, {"max_tokens", c.segmentation.max_tokens}}},
      {"similarity",
       {{"backend", to_string(c.similarity.backend)},
        {"alpha", c.similarity.word.alpha},
        {"beta", c.similarity.word.beta},
        {"delta", c.similarity.delta},
        {"order_threshold", c.similarity.order_threshold},
        {"taxonomy_file", opt(c.taxonomy_file)},
        {"ngram_file", opt(c.ngram_file)}}},
      {"classifiers",
       {{"nb_smoothing", c.classifiers.nb_smoothing},
        {"svm", {{"lambda", c.classifiers.svm.lambda}, {"epochs", c.classifiers.svm.epochs}}},
        {"lsa_rank", c.classifiers.lsa_rank},
        {"simsent_top_n", c.classifiers.simsent_top_n}}},
      {"weights",
       {{"effectiveness", c.weights.effectiveness},
        {"efficiency", c.weights.efficiency},
        {"freedom_from_risk", c.weights.freedom_from_risk}}},
      {"seed", c.seed}};
}

ProjectConfig config_from_json(const json& j, const std::filesystem::path& base_dir) {
  ProjectConfig c;
  reject_unknown(j, "config", {"pipeline", "segmentation", "similarity", "classifiers", "weights", "seed"});
  if (j.contains("pipeline")) {
    const json& p = j.at("pipeline");
    reject_unknown(p, "pipeline", {"lowercase", "strip_punctuation", "min_token_len", "stopwords", "stopwords_file"});
    read(p, "lowercase", c.pipeline.lowercase, "pipeline");
    read(p, "strip_punctuation", c.pipeline.strip_punctuation, "pipeline");
    read(p, "min_token_len", c.pipeline.min_token_len, "pipeline");
    if (p.contains("stopwords") && !p.at("stopwords").is_null()) {
      std::vector<std::string> list;
      read(p, "stopwords", list, "pipeline");
      c.stopword_list = list;
    }
    c.stopwords_file = read_opt_string(p, "stopwords_file", "pipeline");
  }
  if (j.contains("segmentation")) {
    const json& s = j.at("segmentation");
    reject_unknown(s, "segmentation", {"abbreviations", "max_tokens"});
    read(s, "abbreviations", c.segmentation.abbreviations, "segmentation");
    read(s, "max_tokens", c.segmentation.max_tokens, "segmentation");
  }
  if (j.contains("similarity")) {
    const json& s = j.at("similarity");
    reject_unknown(s, "similarity",
                   {"backend", "alpha", "beta", "delta", "order_threshold", "taxonomy_file", "ngram_file"});
    std::string backend = std::string(to_string(c.similarity.backend));
    read(s, "backend", backend, "similarity");
    c.similarity.backend = parse_backend(backend);
    read(s, "alpha", c.similarity.word.alpha, "similarity");
    read(s, "beta", c.similarity.word.beta, "similarity");
    read(s, "delta", c.similarity.delta, "similarity");
    read(s, "order_threshold", c.similarity.order_threshold, "similarity");
    c.taxonomy_file = read_opt_string(s, "taxonomy_file", "similarity");
    c.ngram_file = read_opt_string(s, "ngram_file", "similarity");
  }
  if (j.contains("classifiers")) {
    const json& k = j.at("classifiers");
    reject_unknown(k, "classifiers", {"nb_smoothing", "svm", "lsa_rank", "simsent_top_n"});
    read(k, "nb_smoothing", c.classifiers.nb_smoothing, "classifiers");
    if (k.contains("svm")) {
      const json& s = k.at("svm");
      reject_unknown(s, "classifiers.svm", {"lambda", "epochs"});
      read(s, "lambda", c.classifiers.svm.lambda, "classifiers.svm");
      read(s, "epochs", c.classifiers.svm.epochs, "classifiers.svm");
    }
    read(k, "lsa_rank", c.classifiers.lsa_rank, "classifiers");
    read(k, "simsent_top_n", c.classifiers.simsent_top_n, "classifiers");
  }
  if (j.contains("weights")) {
    const json& w = j.at("weights");
    reject_unknown(w, "weights", {"effectiveness", "efficiency", "freedom_from_risk"});
    read(w, "effectiveness", c.weights.effectiveness, "weights");
    read(w, "efficiency", c.weights.efficiency, "weights");
    read(w, "freedom_from_risk", c.weights.freedom_from_risk, "weights");
  }
  read(j, "seed", c.seed, "config");
  c.classifiers.svm.seed = c.seed;
  c.classifiers.similarity = c.similarity;

  if (c.stopword_list) {
    c.pipeline.stopwords = {c.stopword_list->begin(), c.stopword_list->end()};
  } else if (c.stopwords_file) {
    std::filesystem::path p = *c.stopwords_file;
    if (p.is_relative()) p = base_dir / p;
    c.pipeline.stopwords = load_stopwords(p.string());
  }
  c.validate();
  return c;
}

ProjectConfig load_project_config(const std::filesystem::path& root) {
  const auto path = root / ProjectStore::kConfigFile;
  std::ifstream in(path);
  if (!in) {
    ProjectConfig c;
    c.classifiers.svm.seed = c.seed;
    return c;
  }
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("config: " + path.string() + " is not valid JSON: " + e.what());
  }
  return config_from_json(j, root);
}

void save_project_config(const ProjectConfig& c, const std::filesystem::path& root) {
  const auto path = root / ProjectStore::kConfigFile;
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << config_to_json(c).dump(2) << "\n";
}

std::string config_hash(const ProjectConfig& c) {
  json j = config_to_json(c);
  // Hash the resolved stopword set too, so an edited stopword file changes the hash.
  std::vector<std::string> stop(c.pipeline.stopwords.begin(), c.pipeline.stopwords.end());
  std::sort(stop.begin(), stop.end());
  j["resolved_stopwords"] = stop;
  const std::string text = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::shared_ptr<const Taxonomy> load_config_taxonomy(const ProjectConfig& c, const std::filesystem::path& root) {
  if (!c.taxonomy_file) return nullptr;
  std::filesystem::path p = *c.taxonomy_file;
  if (p.is_relative()) p = root / p;
  return std::make_shared<const Taxonomy>(Taxonomy::load(p.string()));
}

std::shared_ptr<const NgramTable> load_config_ngrams(const ProjectConfig& c, const std::filesystem::path& root) {
  if (!c.ngram_file) return nullptr;
  std::filesystem::path p = *c.ngram_file;
  if (p.is_relative()) p = root / p;
  return std::make_shared<const NgramTable>(NgramTable::load(p.string()));
}

}  // namespace qinu
