#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "pachinko/types.hpp"

namespace pachinko {

enum class ClassifierKind { svm_l2, svm_l1, bernoulli_nb, gaussian_nb };

// Canonical order, also the tie-break order for model selection.
inline constexpr std::array<ClassifierKind, 4> kAllClassifierKinds = {
    ClassifierKind::svm_l2, ClassifierKind::svm_l1, ClassifierKind::bernoulli_nb,
    ClassifierKind::gaussian_nb};

std::string_view to_string(ClassifierKind kind);
std::optional<ClassifierKind> classifier_kind_from_string(std::string_view name);

// Token-id assignment for n-gram features. Built from training data only;
// lookups on unseen tokens return nothing and the feature is dropped.
class Vocabulary {
 public:
  int add(const std::string& token);
  std::optional<int> lookup(const std::string& token) const;
  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  std::unordered_map<std::string, int> index_;
  std::vector<std::string> tokens_;
};

// Sparse counts, sorted by feature id.
struct FeatureVector {
  std::vector<std::pair<int, double>> entries;
};

// Lowercased 1-grams and adjacent 2-grams; tokens are maximal alphanumeric
// runs of length >= 2 (shorter runs are removed before bigrams form).
std::vector<std::string> ngram_features(std::string_view text);

FeatureVector featurize(std::string_view text, const Vocabulary& vocab);
FeatureVector featurize_building(std::string_view text, Vocabulary& vocab);

// 2PR/(P+R); 0 when tp == 0. Throws ValidationError when tp + fn == 0
// (no positives in truth).
double f1_score(std::int64_t tp, std::int64_t fp, std::int64_t fn);

struct TrainOptions {
  double reg = 1.0;         // SVM regularization strength knob
  int epochs = 40;          // subgradient passes
  std::uint64_t seed = 0;   // drives the per-epoch shuffles
};

struct TrainedClassifier {
  ClassifierKind kind = ClassifierKind::svm_l2;
  Vocabulary vocab;

  // SVM parameters (weights indexed by feature id; bias trained as a
  // constant feature, so it is regularized like any weight).
  std::vector<double> weights;
  double bias = 0.0;

  // Naive Bayes parameters; class 0 = negative, class 1 = positive.
  std::array<double, 2> log_prior{0.0, 0.0};
  std::array<std::vector<double>, 2> presence;   // Bernoulli: smoothed P(feature | class)
  std::array<std::vector<double>, 2> mean;       // Gaussian
  std::array<std::vector<double>, 2> variance;   // Gaussian, floored at 1e-9

  // Mean cross-validation F1 per candidate kind, filled by select_model.
  std::map<std::string, double> cv_f1;

  // Positive-minus-negative score; prediction threshold is 0.
  double decision_value(const FeatureVector& features) const;
  bool predict(const FeatureVector& features) const { return decision_value(features) > 0.0; }
  bool predict_text(std::string_view text) const;

  // Recomputes cached all-features-absent class scores; called after
  // training and after deserialization.
  void finalize();

 private:
  std::array<double, 2> zero_score_{0.0, 0.0};
};

// Trains one model kind. Vocabulary is built from `texts`. Throws
// ValidationError if only one class is present.
TrainedClassifier train(ClassifierKind kind, const std::vector<std::string>& texts,
                        const std::vector<bool>& labels, const TrainOptions& options = {});

TrainedClassifier train_on_features(ClassifierKind kind,
                                    const std::vector<FeatureVector>& features,
                                    const std::vector<bool>& labels, Vocabulary vocab,
                                    const TrainOptions& options = {});

struct CvReport {
  std::map<std::string, double> mean_f1;         // kind name -> mean CV F1
  std::vector<std::vector<int>> folds;           // fold -> example indices
  std::string selected;
};

// Stratified k-fold cross-validation over the requested kinds; each fold's
// vocabulary is built from its training portion only. The winner (ties:
// earlier kind in kAllClassifierKinds) is retrained on the full corpus.
TrainedClassifier select_model(const std::vector<std::string>& texts,
                               const std::vector<bool>& labels,
                               const std::vector<ClassifierKind>& kinds, int folds,
                               std::uint64_t seed, CvReport* report = nullptr,
                               const TrainOptions& options = {});

// Annotates every tweet with relevant = predict(text).
void classify(const TrainedClassifier& model, std::vector<TweetRecord>& tweets);

// Versioned JSON document: kind, vocabulary, parameters, CV scores.
void save_classifier(const std::string& path, const TrainedClassifier& model);
TrainedClassifier load_classifier(const std::string& path);

// Labelled corpus CSV with header text,label and label in {0,1}.
std::pair<std::vector<std::string>, std::vector<bool>> load_labelled_corpus(
    const std::string& path);

}  // namespace pachinko
