#include <algorithm>
#include <cmath>

#include <doctest.h>

#include "../support/fixtures.hpp"
#include "pachinko/bayes.hpp"
#include "pachinko/data_model.hpp"
#include "pachinko/error.hpp"
#include "pachinko/rng.hpp"

using namespace pachinko;
using pachinko::testing::TempDir;

namespace {

const std::vector<GsrRecord>& fixture_gsr() {
  static const std::vector<GsrRecord> gsr = pachinko::testing::table2_gsr();
  return gsr;
}

StrataCounts find_stratum(const std::vector<StrataCounts>& counts, const std::string& key) {
  for (const auto& s : counts) {
    if (s.key == key) return s;
  }
  FAIL("stratum not found: " << key);
  return {};
}

}  // namespace

TEST_SUITE("prior") {
  TEST_CASE("empirical-Bayes hyperparameters from the fixture") {
    const BetaParams prior = prior_from_gsr(fixture_gsr());
    CHECK(prior.a == 226.0);
    CHECK(prior.b == 1437.0);
  }

  TEST_CASE("one event row and one non-event row give the uniform prior") {
    const std::vector<GsrRecord> gsr = {{Date(2018, 1, 1), "Perth", true, "", {}},
                                        {Date(2018, 1, 2), "Perth", false, "", {}}};
    const BetaParams prior = prior_from_gsr(gsr);
    CHECK(prior.a == 1.0);
    CHECK(prior.b == 1.0);
    CHECK(prior.mean() == 0.5);
  }

  TEST_CASE("degenerate records are rejected") {
    const std::vector<GsrRecord> all_events = {{Date(2018, 1, 1), "Perth", true, "", {}}};
    CHECK_THROWS_AS(prior_from_gsr(all_events), ValidationError);
    CHECK_THROWS_AS(prior_from_gsr({}), ValidationError);
  }
}

TEST_SUITE("strata counts") {
  TEST_CASE("location scheme reproduces the per-city day table") {
    const auto counts =
        strata_counts(fixture_gsr(), {}, StrataScheme::location, CountMode::days);
    CHECK(counts.size() == 8);
    const auto melbourne = find_stratum(counts, "Melbourne");
    CHECK(melbourne.trials == 209);
    CHECK(melbourne.successes == 57);
    const auto darwin = find_stratum(counts, "Darwin");
    CHECK(darwin.trials == 208);
    CHECK(darwin.successes == 5);
  }

  TEST_CASE("month scheme reproduces the per-month day table") {
    const auto counts = strata_counts(fixture_gsr(), {}, StrataScheme::month, CountMode::days);
    CHECK(counts.size() == 8);
    const auto dec = find_stratum(counts, "Dec");
    CHECK(dec.trials == 248);
    CHECK(dec.successes == 20);
    const auto jul = find_stratum(counts, "Jul");
    CHECK(jul.trials == 79);
    CHECK(jul.successes == 14);
  }

  TEST_CASE("no stratification pools everything") {
    const auto counts = strata_counts(fixture_gsr(), {}, StrataScheme::none, CountMode::days);
    REQUIRE(counts.size() == 1);
    CHECK(counts[0].key == "all");
    CHECK(counts[0].trials == 1663);
    CHECK(counts[0].successes == 226);
  }

  TEST_CASE("tweet mode counts indicative tweets and their event-day share") {
    std::vector<GsrRecord> gsr = {{Date(2018, 1, 1), "Perth", true, "", {}},
                                  {Date(2018, 1, 2), "Perth", false, "", {}},
                                  {Date(2018, 1, 1), "Hobart", false, "", {}}};
    JarGrid jars = build_jar_grid(gsr);
    jars.at(JarKey{Date(2018, 1, 1), "Perth"}).indicative_count = 5;
    jars.at(JarKey{Date(2018, 1, 2), "Perth"}).indicative_count = 2;
    jars.at(JarKey{Date(2018, 1, 1), "Hobart"}).indicative_count = 3;

    const auto by_city = strata_counts(gsr, jars, StrataScheme::location, CountMode::tweets);
    const auto perth = find_stratum(by_city, "Perth");
    CHECK(perth.trials == 7);
    CHECK(perth.successes == 5);
    const auto hobart = find_stratum(by_city, "Hobart");
    CHECK(hobart.trials == 3);
    CHECK(hobart.successes == 0);
  }

  TEST_CASE("location-month keys combine both factors") {
    const auto counts =
        strata_counts(fixture_gsr(), {}, StrataScheme::location_month, CountMode::days);
    CHECK(counts.size() == 64);  // 8 cities x 8 months
    std::int64_t trials = 0;
    for (const auto& s : counts) trials += s.trials;
    CHECK(trials == 1663);
    CHECK(stratum_key(JarKey{Date(2017, 12, 25), "Hobart"}, StrataScheme::location_month) ==
          "Hobart|Dec");
  }
}

TEST_SUITE("conjugate updates") {
  TEST_CASE("strata posterior arithmetic") {
    const BetaParams melbourne =
        strata_posterior(BetaParams{226, 1437}, StrataCounts{"Melbourne", 209, 57});
    CHECK(melbourne.a == 283.0);
    CHECK(melbourne.b == 1589.0);

    const BetaParams empty = strata_posterior(BetaParams{226, 1437}, StrataCounts{"x", 0, 0});
    CHECK(empty.a == 226.0);
    CHECK(empty.b == 1437.0);

    const BetaParams small = strata_posterior(BetaParams{1, 1}, StrataCounts{"x", 10, 4});
    CHECK(small.a == 5.0);
    CHECK(small.b == 7.0);
  }

  TEST_CASE("day posterior arithmetic, including the fractional exponent") {
    const BetaParams melbourne{283, 1589};
    const BetaParams with_tweets = day_posterior(melbourne, 10, 0.24);
    CHECK(with_tweets.a == 293.0);
    CHECK(with_tweets.b == 1589.24);
    CHECK(std::fabs(with_tweets.mean() - 293.0 / 1882.24) < 1e-12);

    // y = 0 still moves the posterior: absence of tweets is weak evidence
    // of absence via the +r term.
    const BetaParams without = day_posterior(melbourne, 0, 0.24);
    CHECK(std::fabs(without.mean() - 283.0 / 1872.24) < 1e-12);
    CHECK(without.mean() < melbourne.mean());

    // r -> 0 limit is the identity
    const BetaParams identity = day_posterior(BetaParams{1, 1}, 0, 0.0);
    CHECK(identity.a == 1.0);
    CHECK(identity.b == 1.0);
  }

  TEST_CASE("conjugacy closure on random inputs") {
    Rng rng(15);
    for (int i = 0; i < 1000; ++i) {
      const auto trials = static_cast<std::int64_t>(rng.below(500)) + 1;
      const auto successes = static_cast<std::int64_t>(rng.below(trials + 1));
      const BetaParams prior{rng.uniform() * 100 + 0.1, rng.uniform() * 100 + 0.1};
      const BetaParams post = strata_posterior(prior, StrataCounts{"s", trials, successes});
      CHECK(post.a > 0.0);
      CHECK(post.b > 0.0);
      const BetaParams day =
          day_posterior(post, static_cast<std::int64_t>(rng.below(50)), rng.uniform() * 10);
      CHECK(day.a > 0.0);
      CHECK(day.b > 0.0);
      CHECK(day.mean() > 0.0);
      CHECK(day.mean() < 1.0);
    }
  }
}

TEST_SUITE("predict_all") {
  TEST_CASE("no tweets and no strata: every prediction equals one value") {
    const auto gsr = fixture_gsr();
    const JarGrid jars = build_jar_grid(gsr);
    const auto predictions = predict_all(gsr, jars, StrataScheme::none, CountMode::days, 0.24);
    REQUIRE(predictions.size() == 1663);
    for (const auto& rec : predictions) {
      CHECK(rec.posterior_mean == predictions.front().posterior_mean);
      CHECK(rec.y == 0);
    }
  }

  TEST_CASE("posterior mean is strictly increasing in y") {
    std::vector<GsrRecord> gsr = {{Date(2018, 1, 1), "Perth", true, "", {}},
                                  {Date(2018, 1, 2), "Perth", false, "", {}}};
    JarGrid jars = build_jar_grid(gsr);
    jars.at(JarKey{Date(2018, 1, 1), "Perth"}).indicative_count = 5;
    const auto predictions = predict_all(gsr, jars, StrataScheme::none, CountMode::days, 1.0);
    REQUIRE(predictions.size() == 2);
    CHECK(predictions[0].posterior_mean > predictions[1].posterior_mean);

    // strictly increasing across a y-sweep
    const BetaParams post{10, 90};
    double last = -1.0;
    for (std::int64_t y = 0; y < 30; ++y) {
      const double mean = day_posterior(post, y, 0.5).mean();
      CHECK(mean > last);
      last = mean;
    }
  }

  TEST_CASE("the chained fixture example lands on the documented value") {
    const auto gsr = fixture_gsr();
    JarGrid jars = build_jar_grid(gsr);
    jars.at(JarKey{Date(2018, 1, 3), "Melbourne"}).indicative_count = 10;
    const auto predictions =
        predict_all(gsr, jars, StrataScheme::location, CountMode::days, 0.24);
    const auto it = std::find_if(predictions.begin(), predictions.end(), [](const auto& rec) {
      return rec.key == JarKey{Date(2018, 1, 3), "Melbourne"};
    });
    REQUIRE(it != predictions.end());
    CHECK(it->stratum == "Melbourne");
    CHECK(it->y == 10);
    CHECK(std::fabs(it->posterior_mean - 293.0 / 1882.24) < 1e-12);
  }

  TEST_CASE("strata posterior means follow the observed event proportions") {
    const BetaParams prior = prior_from_gsr(fixture_gsr());
    const auto counts =
        strata_counts(fixture_gsr(), {}, StrataScheme::location, CountMode::days);
    std::map<std::string, double> means;
    for (const auto& s : counts) means[s.key] = strata_posterior(prior, s).mean();
    const std::vector<std::string> expected_order = {"Melbourne", "Sydney", "Brisbane", "Perth",
                                                     "Canberra", "Adelaide", "Hobart", "Darwin"};
    for (std::size_t i = 1; i < expected_order.size(); ++i) {
      CHECK(means.at(expected_order[i - 1]) > means.at(expected_order[i]));
    }
  }

  TEST_CASE("GSR row order does not matter") {
    auto gsr = fixture_gsr();
    JarGrid jars = build_jar_grid(gsr);
    jars.at(JarKey{Date(2018, 1, 3), "Melbourne"}).indicative_count = 4;
    const auto before = predict_all(gsr, jars, StrataScheme::location_month, CountMode::days, 1.0);

    Rng rng(5);
    rng.shuffle(gsr);
    const auto after = predict_all(gsr, jars, StrataScheme::location_month, CountMode::days, 1.0);
    REQUIRE(before.size() == after.size());
    for (std::size_t i = 0; i < before.size(); ++i) {
      CHECK(before[i].key == after[i].key);
      CHECK(before[i].posterior_mean == after[i].posterior_mean);
    }
  }

  TEST_CASE("evidence ids are copied into the audit trail") {
    std::vector<GsrRecord> gsr = {{Date(2018, 1, 1), "Perth", true, "", {}},
                                  {Date(2018, 1, 2), "Perth", false, "", {}}};
    JarGrid jars = build_jar_grid(gsr);
    auto& jar = jars.at(JarKey{Date(2018, 1, 1), "Perth"});
    jar.indicative_count = 2;
    jar.evidence = {"tweet-a", "tweet-b"};
    const auto predictions = predict_all(gsr, jars, StrataScheme::none, CountMode::days, 1.0);
    CHECK(predictions[0].evidence == std::vector<std::string>{"tweet-a", "tweet-b"});
  }

  TEST_CASE("predictions CSV round-trip") {
    std::vector<GsrRecord> gsr = {{Date(2018, 1, 1), "Perth", true, "", {}},
                                  {Date(2018, 1, 2), "Perth", false, "", {}}};
    JarGrid jars = build_jar_grid(gsr);
    auto& jar = jars.at(JarKey{Date(2018, 1, 1), "Perth"});
    jar.indicative_count = 2;
    jar.evidence = {"a", "b"};
    const auto predictions = predict_all(gsr, jars, StrataScheme::location, CountMode::days, 0.24);

    TempDir dir("pred");
    save_predictions(dir.file("p.csv"), predictions);
    const auto loaded = load_predictions(dir.file("p.csv"));
    REQUIRE(loaded.size() == predictions.size());
    for (std::size_t i = 0; i < loaded.size(); ++i) {
      CHECK(loaded[i].key == predictions[i].key);
      CHECK(loaded[i].stratum == predictions[i].stratum);
      CHECK(loaded[i].y == predictions[i].y);
      CHECK(loaded[i].posterior.a == predictions[i].posterior.a);
      CHECK(loaded[i].posterior.b == predictions[i].posterior.b);
      CHECK(loaded[i].posterior_mean == predictions[i].posterior_mean);
      CHECK(loaded[i].evidence == predictions[i].evidence);
    }
  }
}
