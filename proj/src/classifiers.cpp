#include "qinu/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>

#include <Eigen/SVD>

namespace qinu {

using nlohmann::json;

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require_trained(bool trained) {
  if (!trained) throw ValidationError("model is not trained");
}

std::size_t class_count(const ClassMask& mask) {
  return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), true));
}

std::vector<Tokens> training_tokens(const LabeledDataset& data) {
  std::vector<Tokens> docs;
  docs.reserve(data.size());
  for (const GoldRecord& r : data) docs.push_back(r.tokens);
  return docs;
}

json scores_json(const TopicScores& s, const ClassMask& mask) {
  json j = json::object();
  for (Topic t : kAllTopics) {
    const double v = s[index_of(t)];
    j[std::string(to_string(t))] = (mask[index_of(t)] && std::isfinite(v)) ? json(v) : json(nullptr);
  }
  return j;
}

TopicScores scores_from_json(const json& j) {
  TopicScores s;
  s.fill(kNegInf);
  for (Topic t : kAllTopics) {
    auto it = j.find(std::string(to_string(t)));
    if (it != j.end() && !it->is_null()) s[index_of(t)] = it->get<double>();
  }
  return s;
}

json classes_json(const ClassMask& mask) {
  json arr = json::array();
  for (Topic t : kAllTopics) {
    if (mask[index_of(t)]) arr.push_back(to_string(t));
  }
  return arr;
}

ClassMask classes_from_json(const json& j) {
  ClassMask mask{};
  for (const json& t : j) mask[index_of(parse_topic(t.get<std::string>()))] = true;
  return mask;
}

json vocab_json(const Vocabulary& v) {
  std::vector<std::size_t> df(v.size());
  for (TermId i = 0; i < v.size(); ++i) df[i] = v.document_frequency(i);
  return json{{"terms", v.terms()}, {"df", df}, {"n_documents", v.n_documents()}};
}

std::shared_ptr<const Vocabulary> vocab_from_json(const json& j) {
  return std::make_shared<const Vocabulary>(
      Vocabulary::from_parts(j.at("terms").get<std::vector<std::string>>(),
                             j.at("df").get<std::vector<std::size_t>>(),
                             j.at("n_documents").get<std::size_t>()));
}

json vector_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd vector_from_json(const json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

std::vector<const GoldRecord*> records_in(const LabeledDataset& data, const ClassMask& mask) {
  std::vector<const GoldRecord*> out;
  for (const GoldRecord& r : data) {
    if (mask[index_of(r.topic)]) out.push_back(&r);
  }
  return out;
}

json params_json(const SentenceSimParams& p) {
  return json{{"delta", p.delta},
              {"order_threshold", p.order_threshold},
              {"backend", to_string(p.backend)},
              {"alpha", p.word.alpha},
              {"beta", p.word.beta}};
}

SentenceSimParams params_from_json(const json& j) {
  SentenceSimParams p;
  p.delta = j.at("delta").get<double>();
  p.order_threshold = j.at("order_threshold").get<double>();
  p.backend = parse_backend(j.at("backend").get<std::string>());
  p.word.alpha = j.at("alpha").get<double>();
  p.word.beta = j.at("beta").get<double>();
  p.validate();
  return p;
}

}  // namespace

std::string_view to_string(ClassifierKind k) {
  switch (k) {
    case ClassifierKind::NaiveBayes:
      return "nb";
    case ClassifierKind::Svm:
      return "svm";
    case ClassifierKind::Lsa:
      return "lsa";
    case ClassifierKind::SimSent:
      return "simsent";
  }
  return "nb";
}

ClassifierKind parse_classifier(std::string_view s) {
  for (ClassifierKind k : kAllClassifiers) {
    if (to_string(k) == s) return k;
  }
  throw UsageError("unknown classifier '" + std::string(s) + "' (expected nb, svm, lsa or simsent)");
}

Topic argmax_topic(const TopicScores& scores) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < kTopicCount; ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return kAllTopics[best];
}

Prediction make_prediction(const TopicScores& scores) { return {argmax_topic(scores), scores}; }

ClassMask classes_present(const LabeledDataset& data) {
  ClassMask mask{};
  for (const GoldRecord& r : data) mask[index_of(r.topic)] = true;
  return mask;
}

ClassMask resolve_classes(const LabeledDataset& data, const std::vector<Topic>& requested,
                          std::size_t minimum_classes) {
  const ClassMask present = classes_present(data);
  ClassMask mask{};
  if (requested.empty()) {
    mask = present;
  } else {
    for (Topic t : requested) {
      if (!present[index_of(t)])
        throw ValidationError("missing class: no training examples for '" +
                              std::string(to_string(t)) + "'");
      mask[index_of(t)] = true;
    }
  }
  if (class_count(mask) < minimum_classes)
    throw ValidationError("training data has " + std::to_string(class_count(mask)) +
                          " class(es); at least " + std::to_string(minimum_classes) +
                          " required");
  return mask;
}

// ---------------------------------------------------------------------------
// Naive Bayes

NbModel train_nb(const LabeledDataset& data, double smoothing, std::shared_ptr<const Vocabulary> vocab,
                 const std::vector<Topic>& classes) {
  if (!(smoothing > 0.0)) throw ValidationError("naive Bayes smoothing must be > 0");
  if (!vocab) throw ValidationError("naive Bayes needs a vocabulary");
  NbModel m;
  m.classes = resolve_classes(data, classes, 1);
  m.smoothing = smoothing;
  m.vocab = std::move(vocab);
  const std::size_t dim = m.vocab->size();

  std::array<std::size_t, kTopicCount> docs{};
  std::array<std::vector<double>, kTopicCount> counts;
  std::array<double, kTopicCount> totals{};
  for (auto& c : counts) c.assign(dim, 0.0);
  std::size_t n = 0;
  for (const GoldRecord* r : records_in(data, m.classes)) {
    const std::size_t c = index_of(r->topic);
    ++docs[c];
    ++n;
    for (const auto& [id, count] : vectorize_counts(r->tokens, *m.vocab).entries) {
      counts[c][id] += count;
      totals[c] += count;
    }
  }
  for (std::size_t c = 0; c < kTopicCount; ++c) {
    if (!m.classes[c]) {
      m.log_prior[c] = kNegInf;
      continue;
    }
    m.log_prior[c] = std::log(static_cast<double>(docs[c]) / static_cast<double>(n));
    const double denom = totals[c] + smoothing * static_cast<double>(dim);
    m.log_likelihood[c].resize(dim);
    for (std::size_t t = 0; t < dim; ++t)
      m.log_likelihood[c][t] = std::log((counts[c][t] + smoothing) / denom);
  }
  return m;
}

Prediction predict(const NbModel& model, const Tokens& tokens) {
  require_trained(model.trained());
  const TermVector v = vectorize_counts(tokens, *model.vocab);
  TopicScores s;
  for (std::size_t c = 0; c < kTopicCount; ++c) {
    if (!model.classes[c]) {
      s[c] = kNegInf;
      continue;
    }
    double score = model.log_prior[c];
    for (const auto& [id, count] : v.entries) score += count * model.log_likelihood[c][id];
    s[c] = score;
  }
  return make_prediction(s);
}

// ---------------------------------------------------------------------------
// SVM

void SvmHyper::validate() const {
  if (!(lambda > 0.0)) throw ValidationError("svm.lambda must be > 0");
  if (epochs < 1) throw ValidationError("svm.epochs must be >= 1");
}

double svm_objective(const LinearSvm& svm, const std::vector<TermVector>& xs,
                     const std::vector<int>& labels, double lambda) {
  double sq = svm.bias * svm.bias;
  for (double w : svm.weights) sq += w * w;
  double hinge = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i)
    hinge += std::max(0.0, 1.0 - labels[i] * svm.decision(xs[i]));
  return 0.5 * lambda * sq + (xs.empty() ? 0.0 : hinge / static_cast<double>(xs.size()));
}

LinearSvm train_linear_svm(const std::vector<TermVector>& xs, const std::vector<int>& labels,
                           std::size_t dim, const SvmHyper& hyper, std::uint64_t stream) {
  hyper.validate();
  if (xs.size() != labels.size()) throw ValidationError("svm features and labels differ in length");
  LinearSvm svm;
  svm.weights.assign(dim, 0.0);
  if (xs.empty()) return svm;

  std::seed_seq seq{static_cast<std::uint32_t>(hyper.seed), static_cast<std::uint32_t>(hyper.seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  std::mt19937_64 rng(seq);
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  std::size_t t = 0;
  for (std::size_t epoch = 0; epoch < hyper.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[static_cast<std::size_t>(rng() % i)]);
    }
    for (std::size_t idx : order) {
      ++t;
      const double eta = 1.0 / (hyper.lambda * static_cast<double>(t));
      const double y = labels[idx];
      const bool violated = y * svm.decision(xs[idx]) < 1.0;
      const double shrink = 1.0 - eta * hyper.lambda;
      for (double& w : svm.weights) w *= shrink;
      svm.bias *= shrink;
      if (violated) {
        for (const auto& [id, x] : xs[idx].entries) svm.weights[id] += eta * y * x;
        svm.bias += eta * y;
      }
    }
    svm.objective_history.push_back(svm_objective(svm, xs, labels, hyper.lambda));
  }
  return svm;
}

SvmModel train_svm(const LabeledDataset& data, const SvmHyper& hyper,
                   std::shared_ptr<const Vocabulary> vocab, const std::vector<Topic>& classes) {
  hyper.validate();
  if (!vocab) throw ValidationError("svm needs a vocabulary");
  SvmModel m;
  m.classes = resolve_classes(data, classes, 2);
  m.hyper = hyper;
  m.vocab = std::move(vocab);
  const auto records = records_in(data, m.classes);
  std::vector<TermVector> xs;
  xs.reserve(records.size());
  for (const GoldRecord* r : records)
    xs.push_back(tfidf_transform(vectorize_counts(r->tokens, *m.vocab), *m.vocab));
  for (std::size_t c = 0; c < kTopicCount; ++c) {
    if (!m.classes[c]) continue;
    std::vector<int> labels(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) labels[i] = index_of(records[i]->topic) == c ? 1 : -1;
    m.machines[c] = train_linear_svm(xs, labels, m.vocab->size(), hyper, c);
  }
  return m;
}

Prediction predict(const SvmModel& model, const Tokens& tokens) {
  require_trained(model.trained());
  const TermVector x = tfidf_transform(vectorize_counts(tokens, *model.vocab), *model.vocab);
  TopicScores s;
  for (std::size_t c = 0; c < kTopicCount; ++c)
    s[c] = model.classes[c] ? model.machines[c].decision(x) : kNegInf;
  return make_prediction(s);
}

// ---------------------------------------------------------------------------
// LSA

Eigen::MatrixXd tfidf_document_matrix(const LabeledDataset& data, const Vocabulary& vocab) {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(vocab.size()),
                                            static_cast<Eigen::Index>(data.size()));
  for (std::size_t d = 0; d < data.size(); ++d) {
    for (const auto& [id, w] : tfidf_transform(vectorize_counts(data[d].tokens, vocab), vocab).entries)
      x(static_cast<Eigen::Index>(id), static_cast<Eigen::Index>(d)) = w;
  }
  return x;
}

std::size_t default_lsa_rank(std::size_t n_documents, std::size_t vocab_size) {
  const std::size_t k = std::min({std::size_t{100}, n_documents > 0 ? n_documents - 1 : 0, vocab_size});
  return std::max<std::size_t>(k, 1);
}

Eigen::VectorXd LsaModel::project(const TermVector& tfidf) const {
  Eigen::VectorXd z = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(rank));
  for (const auto& [id, w] : tfidf.entries) z += w * projection.row(static_cast<Eigen::Index>(id)).transpose();
  return z;
}

LsaModel train_lsa(const LabeledDataset& data, std::size_t rank, std::shared_ptr<const Vocabulary> vocab,
                   const std::vector<Topic>& classes) {
  if (!vocab) throw ValidationError("lsa needs a vocabulary");
  LsaModel m;
  m.classes = resolve_classes(data, classes, 1);
  m.vocab = std::move(vocab);
  LabeledDataset docs;
  for (const GoldRecord* r : records_in(data, m.classes)) docs.push_back(*r);
  const std::size_t upper = std::min(m.vocab->size(), docs.size());
  const std::size_t k = rank == 0 ? default_lsa_rank(docs.size(), m.vocab->size()) : rank;
  if (k < 1 || k > upper)
    throw ValidationError("lsa rank " + std::to_string(k) + " out of range [1, " +
                          std::to_string(upper) + "]");
  const Eigen::MatrixXd x = tfidf_document_matrix(docs, *m.vocab);
  if (x.squaredNorm() == 0.0)
    throw ValidationError("lsa term-document matrix is all zero (every term is ubiquitous)");

  Eigen::BDCSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinU);
  m.rank = k;
  m.projection = svd.matrixU().leftCols(static_cast<Eigen::Index>(k));
  m.singular_values = svd.singularValues().head(static_cast<Eigen::Index>(k));
  // Fix the sign of each singular vector so the largest-magnitude entry is positive.
  for (Eigen::Index c = 0; c < m.projection.cols(); ++c) {
    Eigen::Index arg = 0;
    m.projection.col(c).cwiseAbs().maxCoeff(&arg);
    if (m.projection(arg, c) < 0) m.projection.col(c) *= -1.0;
  }

  std::array<std::size_t, kTopicCount> n{};
  for (std::size_t c = 0; c < kTopicCount; ++c) m.centroids[c] = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k));
  for (Eigen::Index d = 0; d < x.cols(); ++d) {
    Eigen::VectorXd z = m.projection.transpose() * x.col(d);
    const double nrm = z.norm();
    if (nrm > 0.0) z /= nrm;
    const std::size_t c = index_of(docs[static_cast<std::size_t>(d)].topic);
    m.centroids[c] += z;
    ++n[c];
  }
  for (std::size_t c = 0; c < kTopicCount; ++c) {
    if (n[c] > 0) m.centroids[c] /= static_cast<double>(n[c]);
  }
  return m;
}

Prediction predict(const LsaModel& model, const Tokens& tokens) {
  require_trained(model.trained());
  const Eigen::VectorXd z =
      model.project(tfidf_transform(vectorize_counts(tokens, *model.vocab), *model.vocab));
  TopicScores s;
  const double zn = z.norm();
  for (std::size_t c = 0; c < kTopicCount; ++c) {
    if (!model.classes[c]) {
      s[c] = kNegInf;
      continue;
    }
    const double cn = model.centroids[c].norm();
    s[c] = (zn > 0.0 && cn > 0.0) ? z.dot(model.centroids[c]) / (zn * cn) : 0.0;
  }
  return make_prediction(s);
}

// ---------------------------------------------------------------------------
// SimSent

bool SimSentModel::trained() const {
  for (const auto& e : exemplars) {
    if (!e.empty()) return true;
  }
  return false;
}

SimSentModel train_simsent(const LabeledDataset& data, const SentenceSimParams& params,
                           Knowledge knowledge, const std::vector<Topic>& classes, std::size_t top_n) {
  params.validate();
  if (top_n < 1) throw ValidationError("simsent top_n must be >= 1");
  SimSentModel m;
  m.classes = resolve_classes(data, classes, 1);
  m.params = params;
  m.knowledge = std::move(knowledge);
  m.top_n = top_n;
  SentenceSimilarity check(params, m.knowledge);  // validates backend/knowledge pairing
  auto records = records_in(data, m.classes);
  std::stable_sort(records.begin(), records.end(), [](const GoldRecord* a, const GoldRecord* b) {
    return a->sentence_id < b->sentence_id;
  });
  for (const GoldRecord* r : records) {
    m.exemplars[index_of(r->topic)].push_back(r->tokens);
    m.exemplar_ids[index_of(r->topic)].push_back(r->sentence_id);
  }
  return m;
}

namespace {

Prediction predict_with(const SimSentModel& model, SentenceSimilarity& scorer, const Tokens& tokens) {
  TopicScores s;
  std::vector<double> sims;
  for (std::size_t c = 0; c < kTopicCount; ++c) {
    if (!model.classes[c]) {
      s[c] = kNegInf;
      continue;
    }
    s[c] = 0.0;
    if (tokens.empty()) continue;
    sims.clear();
    for (const Tokens& ex : model.exemplars[c]) {
      if (!ex.empty()) sims.push_back(scorer(tokens, ex));
    }
    if (sims.empty()) continue;
    const std::size_t n = std::min(model.top_n, sims.size());
    std::partial_sort(sims.begin(), sims.begin() + static_cast<std::ptrdiff_t>(n), sims.end(),
                      std::greater<>());
    s[c] = std::accumulate(sims.begin(), sims.begin() + static_cast<std::ptrdiff_t>(n), 0.0) /
           static_cast<double>(n);
  }
  return make_prediction(s);
}

}  // namespace

Prediction predict(const SimSentModel& model, const Tokens& tokens) {
  require_trained(model.trained());
  SentenceSimilarity scorer(model.params, model.knowledge);
  return predict_with(model, scorer, tokens);
}

std::vector<Prediction> predict_all(const SimSentModel& model, const std::vector<Tokens>& sentences) {
  require_trained(model.trained());
  SentenceSimilarity scorer(model.params, model.knowledge);
  std::vector<Prediction> out;
  out.reserve(sentences.size());
  for (const Tokens& t : sentences) out.push_back(predict_with(model, scorer, t));
  return out;
}

// ---------------------------------------------------------------------------
// Dispatch

ClassifierKind kind_of(const ClassifierModel& model) {
  return static_cast<ClassifierKind>(model.index());
}

Prediction predict(const ClassifierModel& model, const Tokens& tokens) {
  return std::visit([&](const auto& m) { return predict(m, tokens); }, model);
}

std::vector<Prediction> predict_all(const ClassifierModel& model, const std::vector<Tokens>& sentences) {
  if (const auto* sim = std::get_if<SimSentModel>(&model)) return predict_all(*sim, sentences);
  std::vector<Prediction> out;
  out.reserve(sentences.size());
  for (const Tokens& t : sentences) out.push_back(predict(model, t));
  return out;
}

ClassifierModel train_classifier(ClassifierKind kind, const LabeledDataset& data,
                                 const ClassifierHyper& hyper, std::shared_ptr<const Taxonomy> taxonomy,
                                 std::shared_ptr<const NgramTable> ngrams) {
  if (data.empty()) throw ValidationError("no training data");
  const auto docs = training_tokens(data);
  switch (kind) {
    case ClassifierKind::NaiveBayes:
      return train_nb(data, hyper.nb_smoothing, std::make_shared<const Vocabulary>(build_vocabulary(docs)));
    case ClassifierKind::Svm:
      return train_svm(data, hyper.svm, std::make_shared<const Vocabulary>(build_vocabulary(docs)));
    case ClassifierKind::Lsa:
      return train_lsa(data, hyper.lsa_rank, std::make_shared<const Vocabulary>(build_vocabulary(docs)));
    case ClassifierKind::SimSent: {
      Knowledge knowledge;
      if (hyper.similarity.backend == SimilarityBackend::Taxonomy) {
        if (!taxonomy)
          throw ValidationError("simsent with the taxonomy backend needs a taxonomy file "
                                "(similarity.taxonomy_file)");
        knowledge = taxonomy;
      } else {
        knowledge = ngrams ? ngrams : std::make_shared<const NgramTable>(NgramTable::build(docs));
      }
      return train_simsent(data, hyper.similarity, std::move(knowledge), {}, hyper.simsent_top_n);
    }
  }
  throw UsageError("unknown classifier kind");
}

std::shared_ptr<const Vocabulary> model_vocabulary(const ClassifierModel& model) {
  return std::visit(
      [](const auto& m) -> std::shared_ptr<const Vocabulary> {
        if constexpr (requires { m.vocab; }) {
          return m.vocab;
        } else {
          return nullptr;
        }
      },
      model);
}

// ---------------------------------------------------------------------------
// Serialization

json model_to_json(const ClassifierModel& model) {
  json j{{"format_version", 1}, {"kind", to_string(kind_of(model))}};
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        require_trained(m.trained());
        j["classes"] = classes_json(m.classes);
        if constexpr (std::is_same_v<T, NbModel>) {
          j["vocabulary"] = vocab_json(*m.vocab);
          j["smoothing"] = m.smoothing;
          j["log_prior"] = scores_json(m.log_prior, m.classes);
          json ll = json::object();
          for (Topic t : kAllTopics) {
            if (m.classes[index_of(t)]) ll[std::string(to_string(t))] = m.log_likelihood[index_of(t)];
          }
          j["log_likelihood"] = std::move(ll);
        } else if constexpr (std::is_same_v<T, SvmModel>) {
          j["vocabulary"] = vocab_json(*m.vocab);
          j["hyper"] = {{"lambda", m.hyper.lambda}, {"epochs", m.hyper.epochs}, {"seed", m.hyper.seed}};
          json machines = json::object();
          for (Topic t : kAllTopics) {
            const auto& svm = m.machines[index_of(t)];
            if (m.classes[index_of(t)])
              machines[std::string(to_string(t))] = {{"weights", svm.weights}, {"bias", svm.bias}};
          }
          j["machines"] = std::move(machines);
        } else if constexpr (std::is_same_v<T, LsaModel>) {
          j["vocabulary"] = vocab_json(*m.vocab);
          j["rank"] = m.rank;
          std::vector<double> flat(static_cast<std::size_t>(m.projection.size()));
          Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
              flat.data(), m.projection.rows(), m.projection.cols()) = m.projection;
          j["projection"] = {{"rows", m.projection.rows()}, {"cols", m.projection.cols()}, {"data", flat}};
          j["singular_values"] = vector_json(m.singular_values);
          json centroids = json::object();
          for (Topic t : kAllTopics) {
            if (m.classes[index_of(t)]) centroids[std::string(to_string(t))] = vector_json(m.centroids[index_of(t)]);
          }
          j["centroids"] = std::move(centroids);
        } else {
          j["params"] = params_json(m.params);
          j["top_n"] = m.top_n;
          json ex = json::object();
          for (Topic t : kAllTopics) {
            const std::size_t c = index_of(t);
            if (!m.classes[c]) continue;
            json list = json::array();
            for (std::size_t i = 0; i < m.exemplars[c].size(); ++i)
              list.push_back({{"id", m.exemplar_ids[c][i]}, {"tokens", m.exemplars[c][i]}});
            ex[std::string(to_string(t))] = std::move(list);
          }
          j["exemplars"] = std::move(ex);
          j["knowledge"] = std::visit([](const auto& k) { return k->to_json(); }, m.knowledge);
        }
      },
      model);
  return j;
}

ClassifierModel model_from_json(const json& j) {
  try {
    if (j.at("format_version").get<int>() != 1) throw ValidationError("unsupported model format_version");
    const ClassifierKind kind = parse_classifier(j.at("kind").get<std::string>());
    const ClassMask classes = classes_from_json(j.at("classes"));
    switch (kind) {
      case ClassifierKind::NaiveBayes: {
        NbModel m;
        m.classes = classes;
        m.vocab = vocab_from_json(j.at("vocabulary"));
        m.smoothing = j.at("smoothing").get<double>();
        m.log_prior = scores_from_json(j.at("log_prior"));
        for (Topic t : kAllTopics) {
          if (classes[index_of(t)])
            m.log_likelihood[index_of(t)] =
                j.at("log_likelihood").at(std::string(to_string(t))).get<std::vector<double>>();
        }
        return m;
      }
      case ClassifierKind::Svm: {
        SvmModel m;
        m.classes = classes;
        m.vocab = vocab_from_json(j.at("vocabulary"));
        m.hyper.lambda = j.at("hyper").at("lambda").get<double>();
        m.hyper.epochs = j.at("hyper").at("epochs").get<std::size_t>();
        m.hyper.seed = j.at("hyper").at("seed").get<std::uint64_t>();
        for (Topic t : kAllTopics) {
          if (!classes[index_of(t)]) continue;
          const json& mj = j.at("machines").at(std::string(to_string(t)));
          m.machines[index_of(t)].weights = mj.at("weights").get<std::vector<double>>();
          m.machines[index_of(t)].bias = mj.at("bias").get<double>();
        }
        return m;
      }
      case ClassifierKind::Lsa: {
        LsaModel m;
        m.classes = classes;
        m.vocab = vocab_from_json(j.at("vocabulary"));
        m.rank = j.at("rank").get<std::size_t>();
        const json& p = j.at("projection");
        const auto flat = p.at("data").get<std::vector<double>>();
        const auto rows = p.at("rows").get<Eigen::Index>();
        const auto cols = p.at("cols").get<Eigen::Index>();
        if (static_cast<std::size_t>(rows * cols) != flat.size() ||
            static_cast<std::size_t>(rows) != m.vocab->size() || static_cast<std::size_t>(cols) != m.rank)
          throw ValidationError("lsa projection shape does not match vocabulary and rank");
        m.projection = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
            flat.data(), rows, cols);
        m.singular_values = vector_from_json(j.at("singular_values"));
        for (Topic t : kAllTopics) {
          const std::size_t c = index_of(t);
          m.centroids[c] = classes[c] ? vector_from_json(j.at("centroids").at(std::string(to_string(t))))
                                      : Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m.rank));
        }
        return m;
      }
      case ClassifierKind::SimSent: {
        SimSentModel m;
        m.classes = classes;
        m.params = params_from_json(j.at("params"));
        m.top_n = j.at("top_n").get<std::size_t>();
        if (m.params.backend == SimilarityBackend::Taxonomy) {
          m.knowledge = std::make_shared<const Taxonomy>(Taxonomy::from_json(j.at("knowledge")));
        } else {
          m.knowledge = std::make_shared<const NgramTable>(NgramTable::from_json(j.at("knowledge")));
        }
        for (Topic t : kAllTopics) {
          const std::size_t c = index_of(t);
          if (!classes[c]) continue;
          for (const json& e : j.at("exemplars").at(std::string(to_string(t)))) {
            m.exemplar_ids[c].push_back(e.at("id").get<std::string>());
            m.exemplars[c].push_back(e.at("tokens").get<Tokens>());
          }
        }
        return m;
      }
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed model file: ") + e.what());
  }
  throw ValidationError("malformed model file");
}

void save_model(const ClassifierModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw IoError("cannot write model file '" + path + "'");
  out << model_to_json(model).dump() << '\n';
  if (!out) throw IoError("write failed for '" + path + "'");
}

ClassifierModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read model file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError(path + ": " + e.what());
  }
  return model_from_json(j);
}

}  // namespace qinu
