#include <algorithm>
#include <cmath>
#include <map>

#include <doctest.h>

#include "../support/fixtures.hpp"
#include "pachinko/classifier.hpp"
#include "pachinko/error.hpp"
#include "pachinko/file_io.hpp"
#include "pachinko/rng.hpp"
#include "pachinko/synthetic.hpp"

using namespace pachinko;
using pachinko::testing::TempDir;

namespace {

std::map<std::string, int> feature_counts(const std::string& text) {
  std::map<std::string, int> counts;
  for (const auto& f : ngram_features(text)) counts[f] += 1;
  return counts;
}

// Cleanly separable two-topic corpus.
void separable_corpus(int n_per_class, std::uint64_t seed, std::vector<std::string>& texts,
                      std::vector<bool>& labels) {
  SyntheticScenario scenario;
  scenario.seed = seed;
  scenario.start = Date(2018, 1, 1);
  scenario.end = Date(2018, 1, 2);
  scenario.cities = {{"Melbourne", 0.5, std::nullopt}};
  scenario.corpus_positives = n_per_class;
  scenario.corpus_negatives = n_per_class;
  const SyntheticData data = generate_synthetic(scenario);
  texts = data.corpus_texts;
  labels = data.corpus_labels;
}

}  // namespace

TEST_SUITE("ngram features") {
  TEST_CASE("unigrams plus adjacent bigrams, lowercased") {
    const auto counts = feature_counts("Protest tomorrow");
    CHECK(counts == std::map<std::string, int>{
                        {"protest", 1}, {"tomorrow", 1}, {"protest tomorrow", 1}});
  }

  TEST_CASE("tokens shorter than two characters are dropped") {
    CHECK(feature_counts("a b").empty());
    // "a" vanishes before bigrams form, so "big dog" is adjacent
    const auto counts = feature_counts("a big dog");
    CHECK(counts == std::map<std::string, int>{{"big", 1}, {"dog", 1}, {"big dog", 1}});
  }

  TEST_CASE("repeated tokens count multiplicities") {
    const auto counts = feature_counts("march march march");
    CHECK(counts == std::map<std::string, int>{{"march", 3}, {"march march", 2}});
  }

  TEST_CASE("empty text gives an empty vector") {
    Vocabulary vocab;
    CHECK(featurize_building("", vocab).entries.empty());
    CHECK(vocab.size() == 0);
  }

  TEST_CASE("frozen vocabulary ignores unseen tokens") {
    Vocabulary vocab;
    featurize_building("protest rally", vocab);
    const auto fv = featurize("protest unknown", vocab);
    REQUIRE(fv.entries.size() == 1);
    CHECK(vocab.tokens()[static_cast<std::size_t>(fv.entries[0].first)] == "protest");
  }
}

TEST_SUITE("f1") {
  TEST_CASE("fixtures") {
    CHECK(f1_score(10, 0, 0) == 1.0);
    CHECK(f1_score(2, 1, 1) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(f1_score(0, 5, 5) == 0.0);
    CHECK_THROWS_AS(f1_score(0, 5, 0), ValidationError);
  }

  TEST_CASE("monotone non-increasing in fp and fn") {
    Rng rng(3);
    for (int i = 0; i < 500; ++i) {
      const auto tp = static_cast<std::int64_t>(rng.below(20)) + 1;
      const auto fp = static_cast<std::int64_t>(rng.below(20));
      const auto fn = static_cast<std::int64_t>(rng.below(20));
      const double base = f1_score(tp, fp, fn);
      CHECK(base >= 0.0);
      CHECK(base <= 1.0);
      CHECK(f1_score(tp, fp + 1, fn) <= base);
      CHECK(f1_score(tp, fp, fn + 1) <= base);
    }
  }
}

TEST_SUITE("training") {
  TEST_CASE("svm separates two separable points") {
    const std::vector<std::string> texts = {"good stuff", "bad things"};
    const std::vector<bool> labels = {true, false};
    for (ClassifierKind kind : {ClassifierKind::svm_l2, ClassifierKind::svm_l1}) {
      const auto model = train(kind, texts, labels);
      CHECK(model.predict_text("good stuff"));
      CHECK(!model.predict_text("bad things"));
    }
  }

  TEST_CASE("bernoulli nb on the two-document corpus") {
    const auto model = train(ClassifierKind::bernoulli_nb, {"protest", "cat"}, {true, false});
    CHECK(model.predict_text("protest"));
    CHECK(!model.predict_text("cat"));
  }

  TEST_CASE("single-class data refuses to train") {
    CHECK_THROWS_AS(train(ClassifierKind::svm_l2, {"aa", "bb"}, {true, true}), ValidationError);
  }

  TEST_CASE("every kind reaches F1 >= 0.95 on a 200-document separable corpus") {
    std::vector<std::string> texts;
    std::vector<bool> labels;
    separable_corpus(100, 11, texts, labels);
    for (ClassifierKind kind : kAllClassifierKinds) {
      const auto model = train(kind, texts, labels);
      std::int64_t tp = 0, fp = 0, fn = 0;
      for (std::size_t i = 0; i < texts.size(); ++i) {
        const bool pred = model.predict_text(texts[i]);
        if (pred && labels[i]) ++tp;
        if (pred && !labels[i]) ++fp;
        if (!pred && labels[i]) ++fn;
      }
      CHECK(f1_score(tp, fp, fn) >= 0.95);
    }
  }

  TEST_CASE("svm training is deterministic in the seed") {
    std::vector<std::string> texts;
    std::vector<bool> labels;
    separable_corpus(50, 19, texts, labels);
    TrainOptions options;
    options.seed = 99;
    const auto a = train(ClassifierKind::svm_l2, texts, labels, options);
    const auto b = train(ClassifierKind::svm_l2, texts, labels, options);
    CHECK(a.weights == b.weights);
    CHECK(a.bias == b.bias);
  }

  TEST_CASE("all-out-of-vocabulary input falls back to the bias class") {
    std::vector<std::string> texts;
    std::vector<bool> labels;
    separable_corpus(40, 23, texts, labels);
    // Imbalance toward negatives so the bias class is visible (the corpus
    // lists its 40 positives first).
    texts.erase(texts.begin(), texts.begin() + 20);
    labels.erase(labels.begin(), labels.begin() + 20);  // 20 positives, 40 negatives
    for (ClassifierKind kind : kAllClassifierKinds) {
      const auto model = train(kind, texts, labels);
      const double bias_score = model.decision_value(FeatureVector{});
      CHECK(model.predict_text("zzzz qqqq xxxx") == (bias_score > 0.0));
      if (kind == ClassifierKind::bernoulli_nb) {
        // Inspect the trained bias independently: priors plus the
        // all-features-absent mass.
        double expected = model.log_prior[1] - model.log_prior[0];
        for (std::size_t j = 0; j < model.vocab.size(); ++j) {
          expected += std::log1p(-model.presence[1][j]) - std::log1p(-model.presence[0][j]);
        }
        CHECK(bias_score == doctest::Approx(expected).epsilon(1e-9));
      }
      if (kind == ClassifierKind::svm_l2 || kind == ClassifierKind::svm_l1) {
        CHECK(bias_score == model.bias);
      }
    }
  }

  TEST_CASE("duplicating every document leaves NB predictions unchanged") {
    std::vector<std::string> texts;
    std::vector<bool> labels;
    separable_corpus(60, 31, texts, labels);
    std::vector<std::string> doubled = texts;
    doubled.insert(doubled.end(), texts.begin(), texts.end());
    std::vector<bool> doubled_labels = labels;
    doubled_labels.insert(doubled_labels.end(), labels.begin(), labels.end());

    std::vector<std::string> probes = texts;
    probes.push_back("protest rally placards");
    probes.push_back("coffee weather brunch");
    for (ClassifierKind kind : {ClassifierKind::bernoulli_nb, ClassifierKind::gaussian_nb}) {
      const auto once = train(kind, texts, labels);
      const auto twice = train(kind, doubled, doubled_labels);
      for (const auto& probe : probes) {
        CHECK(once.predict_text(probe) == twice.predict_text(probe));
      }
    }
  }

  TEST_CASE("model JSON round-trip preserves decisions") {
    std::vector<std::string> texts;
    std::vector<bool> labels;
    separable_corpus(50, 41, texts, labels);
    TempDir dir("clf");
    for (ClassifierKind kind : kAllClassifierKinds) {
      const auto model = train(kind, texts, labels);
      save_classifier(dir.file("m.json"), model);
      const auto loaded = load_classifier(dir.file("m.json"));
      CHECK(loaded.kind == model.kind);
      for (const auto& text : texts) {
        CHECK(loaded.decision_value(featurize(text, loaded.vocab)) ==
              doctest::Approx(model.decision_value(featurize(text, model.vocab))).epsilon(1e-12));
      }
    }
  }
}

TEST_SUITE("model selection") {
  TEST_CASE("folds are disjoint, cover the corpus, and are seed-reproducible") {
    std::vector<std::string> texts;
    std::vector<bool> labels;
    separable_corpus(60, 51, texts, labels);
    CvReport a, b;
    select_model(texts, labels, {kAllClassifierKinds.begin(), kAllClassifierKinds.end()}, 5, 7,
                 &a);
    select_model(texts, labels, {kAllClassifierKinds.begin(), kAllClassifierKinds.end()}, 5, 7,
                 &b);
    CHECK(a.folds == b.folds);
    CHECK(a.mean_f1 == b.mean_f1);

    std::vector<int> all;
    for (const auto& fold : a.folds) all.insert(all.end(), fold.begin(), fold.end());
    std::sort(all.begin(), all.end());
    std::vector<int> expected(texts.size());
    for (std::size_t i = 0; i < expected.size(); ++i) expected[i] = static_cast<int>(i);
    CHECK(all == expected);
  }

  TEST_CASE("count-blind Bernoulli loses on a repeated-token margin") {
    // Positives repeat the signal token; negatives contain it exactly once.
    // Presence-based Bernoulli sees identical documents, count-aware models
    // separate them perfectly, and svm_l2 wins the resulting tie.
    Rng rng(61);
    std::vector<std::string> texts;
    std::vector<bool> labels;
    const std::vector<std::string> fillers = {"crowd", "street", "banner", "news", "people"};
    for (int i = 0; i < 120; ++i) {
      const bool positive = i % 2 == 0;
      std::string text;
      const int reps = positive ? 5 : 1;
      for (int k = 0; k < reps; ++k) text += "signal ";
      for (int k = 0; k < 3; ++k) text += fillers[rng.below(fillers.size())] + " ";
      texts.push_back(text);
      labels.push_back(positive);
    }
    CvReport report;
    const auto model = select_model(
        texts, labels, {kAllClassifierKinds.begin(), kAllClassifierKinds.end()}, 5, 13, &report);
    CHECK(report.selected == "svm_l2");
    CHECK(model.kind == ClassifierKind::svm_l2);
    CHECK(report.mean_f1.at("svm_l2") >= 0.99);
    CHECK(report.mean_f1.at("bernoulli_nb") < report.mean_f1.at("svm_l2"));
    CHECK(model.cv_f1 == report.mean_f1);
  }

  TEST_CASE("ties resolve in the fixed kind order") {
    // Perfectly separable by a single token: every kind scores 1.0.
    std::vector<std::string> texts;
    std::vector<bool> labels;
    for (int i = 0; i < 40; ++i) {
      texts.push_back(i % 2 == 0 ? "protest now" : "picnic now");
      labels.push_back(i % 2 == 0);
    }
    CvReport report;
    select_model(texts, labels, {kAllClassifierKinds.begin(), kAllClassifierKinds.end()}, 5, 3,
                 &report);
    for (const auto& [kind, f1] : report.mean_f1) CHECK(f1 == 1.0);
    CHECK(report.selected == "svm_l2");
  }

  TEST_CASE("vocabulary is built from training folds only") {
    // A token unique to one document must not leak into other folds'
    // vocabularies: swapping it for a different unseen token cannot change
    // any validation score.
    std::vector<std::string> texts;
    std::vector<bool> labels;
    separable_corpus(40, 71, texts, labels);
    auto variant = texts;
    texts[3] += " uniquetokenalpha";
    variant[3] += " uniquetokenbeta";
    CvReport a, b;
    select_model(texts, labels, {ClassifierKind::gaussian_nb}, 5, 5, &a);
    select_model(variant, labels, {ClassifierKind::gaussian_nb}, 5, 5, &b);
    CHECK(a.mean_f1 == b.mean_f1);
  }

  TEST_CASE("needs enough examples of each class") {
    CHECK_THROWS_AS(select_model({"aa", "bb", "cc"}, {true, false, false},
                                 {ClassifierKind::svm_l2}, 5, 0),
                    ValidationError);
  }
}

TEST_SUITE("classify") {
  TEST_CASE("empty input stays empty and tweets get annotated") {
    std::vector<std::string> texts;
    std::vector<bool> labels;
    separable_corpus(40, 81, texts, labels);
    const auto model = train(ClassifierKind::svm_l2, texts, labels);

    std::vector<TweetRecord> none;
    classify(model, none);
    CHECK(none.empty());

    TweetRecord t;
    t.id = "1";
    t.text = texts[0];  // a positive training document
    t.authored_at = *Timestamp::parse_iso("2018-01-02T09:00:00+11:00");
    std::vector<TweetRecord> tweets = {t};
    classify(model, tweets);
    REQUIRE(tweets[0].annotations.relevant.has_value());
    CHECK(*tweets[0].annotations.relevant);
  }

  TEST_CASE("corpus CSV loader") {
    TempDir dir("corpus");
    pachinko::write_text_file(dir.file("c.csv"),
                              "text,label\nprotest now,1\n\"picnic, pie\",0\n");
    const auto [texts, labels] = load_labelled_corpus(dir.file("c.csv"));
    REQUIRE(texts.size() == 2);
    CHECK(texts[1] == "picnic, pie");
    CHECK(labels == std::vector<bool>{true, false});
  }
}
