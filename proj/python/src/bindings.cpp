#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "qinu/classifiers.hpp"
#include "qinu/cli.hpp"
#include "qinu/config.hpp"
#include "qinu/evaluation.hpp"
#include "qinu/fixture.hpp"
#include "qinu/polarity.hpp"
#include "qinu/similarity.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace {

// Structured values cross the boundary as plain dicts/lists via the json module.
py::object to_py(const json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

json from_py(const py::handle& o) {
  return json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

qinu::LabeledDataset dataset_from_py(const py::handle& records) {
  return from_py(records).get<qinu::LabeledDataset>();
}

std::shared_ptr<const qinu::Taxonomy> taxonomy_from_py(const py::object& o) {
  if (o.is_none()) return nullptr;
  return std::make_shared<const qinu::Taxonomy>(qinu::Taxonomy::from_json(from_py(o)));
}

py::dict scores_to_py(const qinu::TopicScores& s) {
  py::dict d;
  for (qinu::Topic t : qinu::kAllTopics) {
    const double v = s[qinu::index_of(t)];
    d[py::str(std::string(qinu::to_string(t)))] = std::isfinite(v) ? py::object(py::float_(v)) : py::none();
  }
  return d;
}

class Model {
 public:
  explicit Model(qinu::ClassifierModel m) : model_(std::move(m)) {}

  static Model train(const std::string& kind, const py::object& records, const py::object& taxonomy) {
    const auto data = dataset_from_py(records);
    return Model(qinu::train_classifier(qinu::parse_classifier(kind), data, {}, taxonomy_from_py(taxonomy)));
  }
  static Model from_dict(const py::object& d) { return Model(qinu::model_from_json(from_py(d))); }

  std::string kind() const { return std::string(qinu::to_string(qinu::kind_of(model_))); }

  py::tuple predict(const qinu::Tokens& tokens) const {
    const qinu::Prediction p = qinu::predict(model_, tokens);
    return py::make_tuple(std::string(qinu::to_string(p.topic)), scores_to_py(p.scores));
  }
  std::vector<std::string> predict_many(const std::vector<qinu::Tokens>& sentences) const {
    std::vector<std::string> out;
    for (const auto& p : qinu::predict_all(model_, sentences)) out.emplace_back(qinu::to_string(p.topic));
    return out;
  }
  py::object to_dict() const { return to_py(qinu::model_to_json(model_)); }

 private:
  qinu::ClassifierModel model_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Quality-in-use prediction from software review text";

  static py::exception<qinu::Error> error(m, "QinuError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const qinu::Error& e) {
      py::set_error(error, e.what());
    } catch (const json::exception& e) {
      py::set_error(PyExc_ValueError, e.what());
    }
  });

  m.def(
      "tokenize",
      [](const std::string& text, bool lowercase, std::vector<std::string> stopwords) {
        qinu::PipelineConfig c;
        c.lowercase = lowercase;
        if (!stopwords.empty()) c.stopwords = {stopwords.begin(), stopwords.end()};
        return qinu::tokenize(text, c);
      },
      py::arg("text"), py::arg("lowercase") = true, py::arg("stopwords") = std::vector<std::string>{},
      "Tokens after case folding, punctuation stripping and stopword removal.");

  m.def(
      "segment",
      [](const std::string& body, const std::string& review_id) {
        qinu::Review r;
        r.review_id = review_id;
        r.body = body;
        json out = json::array();
        for (const auto& s : qinu::segment_review(r, {})) out.push_back(s);
        return to_py(out);
      },
      py::arg("body"), py::arg("review_id") = "r");

  m.def(
      "generate_fixture",
      [](std::uint64_t seed) {
        qinu::FixtureOptions o;
        o.seed = seed;
        const qinu::Fixture f = qinu::generate_fixture(o, {});
        json reviews = json::array(), annotations = json::array();
        for (const auto& r : f.reviews) reviews.push_back(r);
        for (const auto& a : f.annotations) annotations.push_back(a);
        return to_py(json{{"reviews", reviews},
                          {"annotations", annotations},
                          {"gold", f.gold},
                          {"taxonomy", f.taxonomy.to_json()},
                          {"ngrams", f.ngrams.to_json()}});
      },
      py::arg("seed") = 7, "The synthetic review corpus with its gold standard, taxonomy and n-gram table.");

  m.def(
      "word_similarity",
      [](const std::string& a, const std::string& b, const py::object& taxonomy) {
        return qinu::word_similarity_taxonomy(a, b, *taxonomy_from_py(taxonomy));
      },
      py::arg("a"), py::arg("b"), py::arg("taxonomy"));

  m.def(
      "sentence_similarity",
      [](const qinu::Tokens& a, const qinu::Tokens& b, const py::object& taxonomy) {
        return qinu::sentence_similarity(a, b, {}, taxonomy_from_py(taxonomy));
      },
      py::arg("a"), py::arg("b"), py::arg("taxonomy"));

  py::class_<Model>(m, "Model")
      .def_static("train", &Model::train, py::arg("kind"), py::arg("gold"), py::arg("taxonomy") = py::none(),
                  "Train nb, svm, lsa or simsent on gold records (dicts).")
      .def_static("from_dict", &Model::from_dict)
      .def_property_readonly("kind", &Model::kind)
      .def("predict", &Model::predict, py::arg("tokens"), "Returns (topic, scores).")
      .def("predict_many", &Model::predict_many, py::arg("sentences"))
      .def("to_dict", &Model::to_dict);

  m.def(
      "cross_validate",
      [](const py::object& gold, const std::string& kind, std::size_t k, std::uint64_t seed,
         const py::object& taxonomy) {
        qinu::EvalConfig cfg;
        cfg.taxonomy = taxonomy_from_py(taxonomy);
        const auto report = qinu::cross_validate(dataset_from_py(gold), qinu::parse_classifier(kind), k, seed, cfg);
        return to_py(qinu::eval_report_to_json(report));
      },
      py::arg("gold"), py::arg("kind"), py::arg("k") = 3, py::arg("seed") = 42, py::arg("taxonomy") = py::none());

  m.def(
      "top_keywords",
      [](const py::object& gold, std::size_t k) {
        return to_py(qinu::keywords_to_json(qinu::top_keywords(dataset_from_py(gold), k)));
      },
      py::arg("gold"), py::arg("k") = 5);

  m.def(
      "build_lexicon",
      [](const py::object& gold) { return to_py(qinu::lexicon_to_json(qinu::build_lexicon(dataset_from_py(gold)).lexicon)); },
      py::arg("gold"));

  m.def(
      "score_polarity",
      [](const qinu::Tokens& tokens, const py::object& lexicon) {
        const auto p = qinu::score_polarity(tokens, qinu::lexicon_from_json(from_py(lexicon)));
        return py::make_tuple(std::string(qinu::to_string(p.label)), p.score);
      },
      py::arg("tokens"), py::arg("lexicon"));

  m.def(
      "qinu_score",
      [](const std::vector<std::pair<std::string, std::string>>& classified, std::vector<double> weights) {
        if (weights.size() != 3) throw qinu::UsageError("weights needs three values");
        std::vector<qinu::ClassifiedSentence> in;
        for (const auto& [topic, polarity] : classified) {
          qinu::ClassifiedSentence c;
          c.topic = qinu::parse_topic(topic);
          c.polarity.label = qinu::parse_polarity(polarity);
          in.push_back(c);
        }
        const qinu::QinUWeights w{weights[0], weights[1], weights[2]};
        return to_py(qinu::report_to_json(qinu::qinu_score(qinu::characteristic_scores(in), w)));
      },
      py::arg("classified"), py::arg("weights") = std::vector<double>{1.0 / 3, 1.0 / 3, 1.0 / 3},
      "Characteristic and aggregate scores from (topic, polarity) pairs.");

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = qinu::run_cli(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs a qinu subcommand in-process; returns (exit_code, stdout, stderr).");
}
