#include "pachinko/classifier.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include <nlohmann/json.hpp>

#include "pachinko/csv.hpp"
#include "pachinko/error.hpp"
#include "pachinko/file_io.hpp"
#include "pachinko/rng.hpp"

namespace pachinko {

namespace {
using nlohmann::json;
constexpr double kVarianceFloor = 1e-9;
}  // namespace

std::string_view to_string(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::svm_l2: return "svm_l2";
    case ClassifierKind::svm_l1: return "svm_l1";
    case ClassifierKind::bernoulli_nb: return "bernoulli_nb";
    case ClassifierKind::gaussian_nb: return "gaussian_nb";
  }
  return "?";
}

std::optional<ClassifierKind> classifier_kind_from_string(std::string_view name) {
  for (ClassifierKind k : kAllClassifierKinds) {
    if (name == to_string(k)) return k;
  }
  return std::nullopt;
}

int Vocabulary::add(const std::string& token) {
  const auto [it, inserted] = index_.emplace(token, static_cast<int>(tokens_.size()));
  if (inserted) tokens_.push_back(token);
  return it->second;
}

std::optional<int> Vocabulary::lookup(const std::string& token) const {
  const auto it = index_.find(token);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> ngram_features(std::string_view text) {
  std::vector<std::string> words;
  std::string current;
  auto flush = [&] {
    if (current.size() >= 2) words.push_back(current);
    current.clear();
  };
  for (char raw : text) {
    const auto c = static_cast<unsigned char>(raw);
    if (std::isalnum(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else {
      flush();
    }
  }
  flush();

  std::vector<std::string> features = words;
  for (std::size_t i = 0; i + 1 < words.size(); ++i) {
    features.push_back(words[i] + " " + words[i + 1]);
  }
  return features;
}

namespace {

FeatureVector counts_to_vector(const std::map<int, double>& counts) {
  FeatureVector fv;
  fv.entries.assign(counts.begin(), counts.end());
  return fv;
}

}  // namespace

FeatureVector featurize(std::string_view text, const Vocabulary& vocab) {
  std::map<int, double> counts;
  for (const auto& f : ngram_features(text)) {
    if (const auto id = vocab.lookup(f)) counts[*id] += 1.0;
  }
  return counts_to_vector(counts);
}

FeatureVector featurize_building(std::string_view text, Vocabulary& vocab) {
  std::map<int, double> counts;
  for (const auto& f : ngram_features(text)) counts[vocab.add(f)] += 1.0;
  return counts_to_vector(counts);
}

double f1_score(std::int64_t tp, std::int64_t fp, std::int64_t fn) {
  if (tp < 0 || fp < 0 || fn < 0) throw ValidationError("f1_score: negative count");
  if (tp + fn == 0) throw ValidationError("f1_score undefined: no positives in truth");
  if (tp == 0) return 0.0;
  const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  const double recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  return 2.0 * precision * recall / (precision + recall);
}

namespace {

double sparse_dot(const std::vector<double>& weights, const FeatureVector& fv) {
  double acc = 0.0;
  for (const auto& [id, value] : fv.entries) acc += weights[static_cast<std::size_t>(id)] * value;
  return acc;
}

// Pegasos-style hinge subgradient descent, eta_t = 1 / (lambda (t + 1)).
// The weight vector is kept as scale * direction so the per-step L2 shrink
// is O(1) instead of O(V).
void train_svm_l2(TrainedClassifier& model, const std::vector<FeatureVector>& features,
                  const std::vector<bool>& labels, const TrainOptions& options) {
  const std::size_t n = features.size();
  const std::size_t dim = model.vocab.size();
  const double lambda = 1.0 / (options.reg * static_cast<double>(n));

  std::vector<double> v(dim, 0.0);
  double v_bias = 0.0;
  double scale = 1.0;
  Rng rng = Rng(options.seed).fork("svm-l2");

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;

  std::uint64_t t = 0;
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    rng.shuffle(order);
    for (const std::size_t idx : order) {
      ++t;
      const double eta = 1.0 / (lambda * static_cast<double>(t + 1));
      const double y = labels[idx] ? 1.0 : -1.0;
      const double margin = y * scale * (sparse_dot(v, features[idx]) + v_bias);
      scale *= 1.0 - eta * lambda;
      if (margin < 1.0) {
        const double step = eta * y / scale;
        for (const auto& [id, value] : features[idx].entries) {
          v[static_cast<std::size_t>(id)] += step * value;
        }
        v_bias += step;
      }
      if (scale < 1e-9) {
        for (auto& w : v) w *= scale;
        v_bias *= scale;
        scale = 1.0;
      }
    }
  }
  model.weights.assign(dim, 0.0);
  for (std::size_t j = 0; j < dim; ++j) model.weights[j] = scale * v[j];
  model.bias = scale * v_bias;
}

// Hinge subgradient with the cumulative-L1-penalty scheme: the running total
// of accrued penalty is applied to a coordinate lazily, when it is next
// touched, via soft-thresholding toward zero.
void train_svm_l1(TrainedClassifier& model, const std::vector<FeatureVector>& features,
                  const std::vector<bool>& labels, const TrainOptions& options) {
  const std::size_t n = features.size();
  const std::size_t dim = model.vocab.size();
  const double lambda = 1.0 / (options.reg * static_cast<double>(n));

  std::vector<double> w(dim + 1, 0.0);  // last slot: bias
  std::vector<double> applied(dim + 1, 0.0);
  double total_penalty = 0.0;
  Rng rng = Rng(options.seed).fork("svm-l1");

  auto settle = [&](std::size_t j) {
    const double pending = total_penalty - applied[j];
    if (pending > 0.0) {
      if (w[j] > 0.0) {
        w[j] = std::max(0.0, w[j] - pending);
      } else if (w[j] < 0.0) {
        w[j] = std::min(0.0, w[j] + pending);
      }
      applied[j] = total_penalty;
    }
  };

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;

  std::uint64_t t = 0;
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    rng.shuffle(order);
    for (const std::size_t idx : order) {
      ++t;
      const double eta = 1.0 / (lambda * static_cast<double>(t + 1));
      const double y = labels[idx] ? 1.0 : -1.0;
      for (const auto& [id, value] : features[idx].entries) settle(static_cast<std::size_t>(id));
      settle(dim);
      const double margin = y * (sparse_dot(w, features[idx]) + w[dim]);
      if (margin < 1.0) {
        for (const auto& [id, value] : features[idx].entries) {
          w[static_cast<std::size_t>(id)] += eta * y * value;
        }
        w[dim] += eta * y;
      }
      total_penalty += eta * lambda;
    }
  }
  for (std::size_t j = 0; j <= dim; ++j) settle(j);

  model.weights.assign(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(dim));
  model.bias = w[dim];
}

void train_bernoulli_nb(TrainedClassifier& model, const std::vector<FeatureVector>& features,
                        const std::vector<bool>& labels) {
  const std::size_t dim = model.vocab.size();
  std::array<std::vector<double>, 2> present{std::vector<double>(dim, 0.0),
                                             std::vector<double>(dim, 0.0)};
  std::array<double, 2> class_count{0.0, 0.0};
  for (std::size_t i = 0; i < features.size(); ++i) {
    const int c = labels[i] ? 1 : 0;
    class_count[c] += 1.0;
    for (const auto& [id, value] : features[i].entries) {
      if (value > 0.0) present[c][static_cast<std::size_t>(id)] += 1.0;
    }
  }
  const double n = class_count[0] + class_count[1];
  for (int c = 0; c < 2; ++c) {
    model.log_prior[c] = std::log(class_count[c] / n);
    model.presence[c].resize(dim);
    for (std::size_t j = 0; j < dim; ++j) {
      model.presence[c][j] = (present[c][j] + 1.0) / (class_count[c] + 2.0);  // add-one
    }
  }
}

void train_gaussian_nb(TrainedClassifier& model, const std::vector<FeatureVector>& features,
                       const std::vector<bool>& labels) {
  const std::size_t dim = model.vocab.size();
  std::array<std::vector<double>, 2> sum{std::vector<double>(dim, 0.0),
                                         std::vector<double>(dim, 0.0)};
  std::array<std::vector<double>, 2> sumsq{std::vector<double>(dim, 0.0),
                                           std::vector<double>(dim, 0.0)};
  std::array<double, 2> class_count{0.0, 0.0};
  for (std::size_t i = 0; i < features.size(); ++i) {
    const int c = labels[i] ? 1 : 0;
    class_count[c] += 1.0;
    for (const auto& [id, value] : features[i].entries) {
      sum[c][static_cast<std::size_t>(id)] += value;
      sumsq[c][static_cast<std::size_t>(id)] += value * value;
    }
  }
  const double n = class_count[0] + class_count[1];
  for (int c = 0; c < 2; ++c) {
    model.log_prior[c] = std::log(class_count[c] / n);
    model.mean[c].resize(dim);
    model.variance[c].resize(dim);
    for (std::size_t j = 0; j < dim; ++j) {
      const double mu = sum[c][j] / class_count[c];
      const double var = sumsq[c][j] / class_count[c] - mu * mu;
      model.mean[c][j] = mu;
      model.variance[c][j] = std::max(var, kVarianceFloor);
    }
  }
}

}  // namespace

void TrainedClassifier::finalize() {
  zero_score_ = {0.0, 0.0};
  if (kind == ClassifierKind::bernoulli_nb) {
    for (int c = 0; c < 2; ++c) {
      for (const double p : presence[c]) zero_score_[c] += std::log1p(-p);
    }
  } else if (kind == ClassifierKind::gaussian_nb) {
    for (int c = 0; c < 2; ++c) {
      for (std::size_t j = 0; j < mean[c].size(); ++j) {
        const double var = variance[c][j];
        zero_score_[c] +=
            -0.5 * std::log(2.0 * M_PI * var) - mean[c][j] * mean[c][j] / (2.0 * var);
      }
    }
  }
}

double TrainedClassifier::decision_value(const FeatureVector& features) const {
  switch (kind) {
    case ClassifierKind::svm_l2:
    case ClassifierKind::svm_l1:
      return sparse_dot(weights, features) + bias;
    case ClassifierKind::bernoulli_nb: {
      std::array<double, 2> score{log_prior[0] + zero_score_[0], log_prior[1] + zero_score_[1]};
      for (const auto& [id, value] : features.entries) {
        if (value <= 0.0) continue;
        for (int c = 0; c < 2; ++c) {
          const double p = presence[c][static_cast<std::size_t>(id)];
          score[c] += std::log(p) - std::log1p(-p);
        }
      }
      return score[1] - score[0];
    }
    case ClassifierKind::gaussian_nb: {
      std::array<double, 2> score{log_prior[0] + zero_score_[0], log_prior[1] + zero_score_[1]};
      for (const auto& [id, value] : features.entries) {
        for (int c = 0; c < 2; ++c) {
          const std::size_t j = static_cast<std::size_t>(id);
          const double mu = mean[c][j];
          const double var = variance[c][j];
          score[c] += (2.0 * value * mu - value * value) / (2.0 * var);
        }
      }
      return score[1] - score[0];
    }
  }
  return 0.0;
}

bool TrainedClassifier::predict_text(std::string_view text) const {
  return predict(featurize(text, vocab));
}

TrainedClassifier train_on_features(ClassifierKind kind,
                                    const std::vector<FeatureVector>& features,
                                    const std::vector<bool>& labels, Vocabulary vocab,
                                    const TrainOptions& options) {
  if (features.size() != labels.size()) {
    throw ValidationError("train: features/labels size mismatch");
  }
  const auto positives = static_cast<std::size_t>(
      std::count(labels.begin(), labels.end(), true));
  if (positives == 0 || positives == labels.size()) {
    throw ValidationError("train: both classes must be present in the training data");
  }

  TrainedClassifier model;
  model.kind = kind;
  model.vocab = std::move(vocab);
  switch (kind) {
    case ClassifierKind::svm_l2: train_svm_l2(model, features, labels, options); break;
    case ClassifierKind::svm_l1: train_svm_l1(model, features, labels, options); break;
    case ClassifierKind::bernoulli_nb: train_bernoulli_nb(model, features, labels); break;
    case ClassifierKind::gaussian_nb: train_gaussian_nb(model, features, labels); break;
  }
  model.finalize();
  return model;
}

TrainedClassifier train(ClassifierKind kind, const std::vector<std::string>& texts,
                        const std::vector<bool>& labels, const TrainOptions& options) {
  Vocabulary vocab;
  std::vector<FeatureVector> features;
  features.reserve(texts.size());
  for (const auto& text : texts) features.push_back(featurize_building(text, vocab));
  return train_on_features(kind, features, labels, std::move(vocab), options);
}

TrainedClassifier select_model(const std::vector<std::string>& texts,
                               const std::vector<bool>& labels,
                               const std::vector<ClassifierKind>& kinds, int folds,
                               std::uint64_t seed, CvReport* report,
                               const TrainOptions& options) {
  if (texts.size() != labels.size()) throw ValidationError("select_model: size mismatch");
  if (folds < 2) throw ValidationError("select_model: folds must be >= 2");
  if (kinds.empty()) throw ValidationError("select_model: no candidate kinds");

  std::vector<int> pos, neg;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    (labels[i] ? pos : neg).push_back(static_cast<int>(i));
  }
  if (static_cast<int>(pos.size()) < folds || static_cast<int>(neg.size()) < folds) {
    throw ValidationError("select_model: need at least " + std::to_string(folds) +
                          " examples of each class");
  }

  // Stratified fold assignment: shuffle each class, deal round-robin. This
  // keeps every training portion two-class and is reproducible from the seed.
  Rng base(seed);
  base.fork("cv-pos").shuffle(pos);
  base.fork("cv-neg").shuffle(neg);
  std::vector<std::vector<int>> fold_indices(static_cast<std::size_t>(folds));
  for (std::size_t i = 0; i < pos.size(); ++i) fold_indices[i % folds].push_back(pos[i]);
  for (std::size_t i = 0; i < neg.size(); ++i) fold_indices[i % folds].push_back(neg[i]);
  for (auto& f : fold_indices) std::sort(f.begin(), f.end());

  // Candidate kinds in canonical order (which is also the tie-break order).
  std::vector<ClassifierKind> candidates;
  for (ClassifierKind k : kAllClassifierKinds) {
    if (std::find(kinds.begin(), kinds.end(), k) != kinds.end()) candidates.push_back(k);
  }

  std::map<std::string, double> mean_f1;
  std::optional<ClassifierKind> best;
  double best_score = -1.0;
  for (ClassifierKind kind : candidates) {
    double f1_sum = 0.0;
    for (int f = 0; f < folds; ++f) {
      std::vector<std::string> train_texts;
      std::vector<bool> train_labels;
      for (int g = 0; g < folds; ++g) {
        if (g == f) continue;
        for (int idx : fold_indices[static_cast<std::size_t>(g)]) {
          train_texts.push_back(texts[static_cast<std::size_t>(idx)]);
          train_labels.push_back(labels[static_cast<std::size_t>(idx)]);
        }
      }
      TrainOptions fold_options = options;
      fold_options.seed = Rng(seed).fork(std::string(to_string(kind)) + "/fold" +
                                         std::to_string(f)).next_u64();
      const TrainedClassifier model = train(kind, train_texts, train_labels, fold_options);

      std::int64_t tp = 0, fp = 0, fn = 0;
      for (int idx : fold_indices[static_cast<std::size_t>(f)]) {
        const bool truth = labels[static_cast<std::size_t>(idx)];
        const bool pred = model.predict_text(texts[static_cast<std::size_t>(idx)]);
        if (pred && truth) ++tp;
        if (pred && !truth) ++fp;
        if (!pred && truth) ++fn;
      }
      f1_sum += f1_score(tp, fp, fn);
    }
    const double mean = f1_sum / folds;
    mean_f1[std::string(to_string(kind))] = mean;
    if (mean > best_score) {
      best_score = mean;
      best = kind;
    }
  }

  TrainOptions final_options = options;
  final_options.seed = Rng(seed).fork("final").next_u64();
  TrainedClassifier winner = train(*best, texts, labels, final_options);
  winner.cv_f1 = mean_f1;
  if (report) {
    report->mean_f1 = mean_f1;
    report->folds = fold_indices;
    report->selected = std::string(to_string(*best));
  }
  return winner;
}

void classify(const TrainedClassifier& model, std::vector<TweetRecord>& tweets) {
  for (auto& tweet : tweets) {
    tweet.annotations.relevant = model.predict_text(tweet.text);
  }
}

void save_classifier(const std::string& path, const TrainedClassifier& model) {
  json j;
  j["format"] = "pachinko-classifier/1";
  j["kind"] = std::string(to_string(model.kind));
  j["vocabulary"] = model.vocab.tokens();
  j["cv_f1"] = model.cv_f1;
  json params;
  switch (model.kind) {
    case ClassifierKind::svm_l2:
    case ClassifierKind::svm_l1:
      params["weights"] = model.weights;
      params["bias"] = model.bias;
      break;
    case ClassifierKind::bernoulli_nb:
      params["log_prior"] = model.log_prior;
      params["presence"] = model.presence;
      break;
    case ClassifierKind::gaussian_nb:
      params["log_prior"] = model.log_prior;
      params["mean"] = model.mean;
      params["variance"] = model.variance;
      break;
  }
  j["params"] = params;
  write_text_file(path, j.dump(2) + "\n");
}

TrainedClassifier load_classifier(const std::string& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": invalid JSON: " + std::string(e.what()));
  }
  if (j.value("format", "") != "pachinko-classifier/1") {
    throw ValidationError(path + ": unsupported classifier format");
  }
  const auto kind = classifier_kind_from_string(j.at("kind").get<std::string>());
  if (!kind) throw ValidationError(path + ": unknown classifier kind");

  TrainedClassifier model;
  model.kind = *kind;
  for (const auto& token : j.at("vocabulary")) model.vocab.add(token.get<std::string>());
  if (j.contains("cv_f1")) {
    model.cv_f1 = j["cv_f1"].get<std::map<std::string, double>>();
  }
  const auto& params = j.at("params");
  switch (model.kind) {
    case ClassifierKind::svm_l2:
    case ClassifierKind::svm_l1:
      model.weights = params.at("weights").get<std::vector<double>>();
      model.bias = params.at("bias").get<double>();
      if (model.weights.size() != model.vocab.size()) {
        throw ValidationError(path + ": weight/vocabulary size mismatch");
      }
      break;
    case ClassifierKind::bernoulli_nb:
      model.log_prior = params.at("log_prior").get<std::array<double, 2>>();
      model.presence = params.at("presence").get<std::array<std::vector<double>, 2>>();
      break;
    case ClassifierKind::gaussian_nb:
      model.log_prior = params.at("log_prior").get<std::array<double, 2>>();
      model.mean = params.at("mean").get<std::array<std::vector<double>, 2>>();
      model.variance = params.at("variance").get<std::array<std::vector<double>, 2>>();
      break;
  }
  model.finalize();
  return model;
}

std::pair<std::vector<std::string>, std::vector<bool>> load_labelled_corpus(
    const std::string& path) {
  const auto rows = csv::read_file(path);
  if (rows.empty()) throw ParseError(path + ": missing header row");
  if (rows.front().fields != std::vector<std::string>{"text", "label"}) {
    throw ParseError(path + ": expected header text,label");
  }
  std::vector<std::string> texts;
  std::vector<bool> labels;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.fields.size() == 1 && row.fields[0].empty()) continue;
    if (row.fields.size() != 2) {
      throw ParseError(path + ":" + std::to_string(row.line) + ": expected 2 fields");
    }
    if (row.fields[1] != "0" && row.fields[1] != "1") {
      throw ParseError(path + ":" + std::to_string(row.line) + ": label must be 0 or 1");
    }
    texts.push_back(row.fields[0]);
    labels.push_back(row.fields[1] == "1");
  }
  return {std::move(texts), std::move(labels)};
}

}  // namespace pachinko
