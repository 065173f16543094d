#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "qinu/corpus.hpp"
#include "qinu/similarity.hpp"
#include "qinu/text_pipeline.hpp"
#include "qinu/types.hpp"

namespace qinu {

enum class ClassifierKind { NaiveBayes, Svm, Lsa, SimSent };

inline constexpr std::array<ClassifierKind, 4> kAllClassifiers = {
    ClassifierKind::NaiveBayes, ClassifierKind::Svm, ClassifierKind::Lsa, ClassifierKind::SimSent};

std::string_view to_string(ClassifierKind k);
ClassifierKind parse_classifier(std::string_view s);

struct Prediction {
  Topic topic = Topic::Effectiveness;
  TopicScores scores{};
};

/// Argmax with ties resolved by the fixed topic order.
Topic argmax_topic(const TopicScores& scores);

/// Builds a prediction from per-topic scores. Topics a model has not been
/// trained on score -infinity.
Prediction make_prediction(const TopicScores& scores);

using ClassMask = std::array<bool, kTopicCount>;

/// Classes present in a dataset.
ClassMask classes_present(const LabeledDataset& data);

/// Checks that every requested class has at least one example; an empty
/// request means "the classes present".
ClassMask resolve_classes(const LabeledDataset& data, const std::vector<Topic>& requested,
                          std::size_t minimum_classes);

// ---------------------------------------------------------------------------
// Multinomial naive Bayes over raw counts.

struct NbModel {
  std::shared_ptr<const Vocabulary> vocab;
  ClassMask classes{};
  double smoothing = 1.0;
  TopicScores log_prior{};
  /// log_likelihood[c][term]
  std::array<std::vector<double>, kTopicCount> log_likelihood;

  bool trained() const { return vocab != nullptr; }
};

NbModel train_nb(const LabeledDataset& data, double smoothing, std::shared_ptr<const Vocabulary> vocab,
                 const std::vector<Topic>& classes = {});
Prediction predict(const NbModel& model, const Tokens& tokens);

// ---------------------------------------------------------------------------
// One-vs-rest linear SVM on tf-idf vectors.

struct SvmHyper {
  double lambda = 1e-3;
  std::size_t epochs = 50;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Binary linear separator trained with seeded stochastic subgradient
/// descent (step 1/(lambda t)) on the L2-regularized hinge loss. The bias is a
/// weight on a constant feature and is regularized with the rest.
struct LinearSvm {
  std::vector<double> weights;
  double bias = 0.0;
  /// Regularized hinge objective after each epoch.
  std::vector<double> objective_history;

  double decision(const TermVector& x) const { return dot(x, weights) + bias; }
};

double svm_objective(const LinearSvm& svm, const std::vector<TermVector>& xs,
                     const std::vector<int>& labels, double lambda);

LinearSvm train_linear_svm(const std::vector<TermVector>& xs, const std::vector<int>& labels,
                           std::size_t dim, const SvmHyper& hyper, std::uint64_t stream = 0);

struct SvmModel {
  std::shared_ptr<const Vocabulary> vocab;
  ClassMask classes{};
  SvmHyper hyper;
  std::array<LinearSvm, kTopicCount> machines;

  bool trained() const { return vocab != nullptr; }
};

SvmModel train_svm(const LabeledDataset& data, const SvmHyper& hyper,
                   std::shared_ptr<const Vocabulary> vocab, const std::vector<Topic>& classes = {});
Prediction predict(const SvmModel& model, const Tokens& tokens);

// ---------------------------------------------------------------------------
// LSA: truncated SVD of the tf-idf term-document matrix, nearest centroid.

struct LsaModel {
  std::shared_ptr<const Vocabulary> vocab;
  ClassMask classes{};
  std::size_t rank = 0;
  Eigen::MatrixXd projection;  // |V| x rank, orthonormal columns
  Eigen::VectorXd singular_values;
  std::array<Eigen::VectorXd, kTopicCount> centroids;

  bool trained() const { return vocab != nullptr; }
  Eigen::VectorXd project(const TermVector& tfidf) const;
};

/// Columns are L2-normalized tf-idf document vectors.
Eigen::MatrixXd tfidf_document_matrix(const LabeledDataset& data, const Vocabulary& vocab);

std::size_t default_lsa_rank(std::size_t n_documents, std::size_t vocab_size);

/// rank 0 selects default_lsa_rank.
LsaModel train_lsa(const LabeledDataset& data, std::size_t rank,
                   std::shared_ptr<const Vocabulary> vocab, const std::vector<Topic>& classes = {});
Prediction predict(const LsaModel& model, const Tokens& tokens);

// ---------------------------------------------------------------------------
// Similarity classifier: mean of the top-n sentence similarities per class.

struct SimSentModel {
  SentenceSimParams params;
  Knowledge knowledge;
  std::size_t top_n = 3;
  ClassMask classes{};
  std::array<std::vector<Tokens>, kTopicCount> exemplars;
  std::array<std::vector<std::string>, kTopicCount> exemplar_ids;

  bool trained() const;
};

SimSentModel train_simsent(const LabeledDataset& data, const SentenceSimParams& params,
                           Knowledge knowledge, const std::vector<Topic>& classes = {},
                           std::size_t top_n = 3);
Prediction predict(const SimSentModel& model, const Tokens& tokens);
/// Batch prediction sharing one word-similarity cache.
std::vector<Prediction> predict_all(const SimSentModel& model, const std::vector<Tokens>& sentences);

// ---------------------------------------------------------------------------

using ClassifierModel = std::variant<NbModel, SvmModel, LsaModel, SimSentModel>;

ClassifierKind kind_of(const ClassifierModel& model);
Prediction predict(const ClassifierModel& model, const Tokens& tokens);
std::vector<Prediction> predict_all(const ClassifierModel& model,
                                    const std::vector<Tokens>& sentences);

struct ClassifierHyper {
  double nb_smoothing = 1.0;
  SvmHyper svm;
  std::size_t lsa_rank = 0;
  std::size_t simsent_top_n = 3;
  SentenceSimParams similarity;
};

/// Builds the vocabulary from the training documents and trains one model.
/// For SimSent with the n-gram backend and no table supplied, the table is
/// built from the training tokens.
ClassifierModel train_classifier(ClassifierKind kind, const LabeledDataset& data,
                                 const ClassifierHyper& hyper,
                                 std::shared_ptr<const Taxonomy> taxonomy = nullptr,
                                 std::shared_ptr<const NgramTable> ngrams = nullptr);

/// The vocabulary a trained model predicts with (null for SimSent).
std::shared_ptr<const Vocabulary> model_vocabulary(const ClassifierModel& model);

nlohmann::json model_to_json(const ClassifierModel& model);
ClassifierModel model_from_json(const nlohmann::json& j);
void save_model(const ClassifierModel& model, const std::string& path);
ClassifierModel load_model(const std::string& path);

}  // namespace qinu
