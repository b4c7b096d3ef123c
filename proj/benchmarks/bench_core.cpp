#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "pachinko/bayes.hpp"
#include "pachinko/classifier.hpp"
#include "pachinko/count_models.hpp"
#include "pachinko/data_model.hpp"
#include "pachinko/evaluation.hpp"
#include "pachinko/geo.hpp"
#include "pachinko/rng.hpp"
#include "pachinko/sha256.hpp"
#include "pachinko/temporal.hpp"

using namespace pachinko;

namespace {

void BM_Haversine(benchmark::State& state) {
  const GeoPoint sydney{-33.8688, 151.2093};
  const GeoPoint melbourne{-37.8136, 144.9631};
  for (auto _ : state) {
    benchmark::DoNotOptimize(haversine_miles(sydney, melbourne));
  }
}
BENCHMARK(BM_Haversine);

void BM_ResolveTemporal(benchmark::State& state) {
  const Timestamp authored = *Timestamp::parse_iso("2018-01-02T09:00:00+11:00");
  const std::string text =
      "Let's protest tomorrow at the University of Melbourne and again on 14 February";
  for (auto _ : state) {
    benchmark::DoNotOptimize(resolve_temporal(text, authored));
  }
}
BENCHMARK(BM_ResolveTemporal);

void BM_NgramFeatures(benchmark::State& state) {
  const std::string text =
      "Workers unite in Melbourne on 14 February 2018 bring your placards and banners";
  for (auto _ : state) {
    benchmark::DoNotOptimize(ngram_features(text));
  }
}
BENCHMARK(BM_NgramFeatures);

void BM_RocAuc(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(1);
  std::vector<double> scores(n);
  std::vector<bool> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    scores[i] = rng.uniform();
    labels[i] = rng.uniform() < 0.3;
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(auc(roc_curve(scores, labels)));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_RocAuc)->Range(1 << 8, 1 << 15)->Complexity(benchmark::oNLogN);

void BM_NegBinomFit(benchmark::State& state) {
  Rng rng(2);
  std::vector<DailyCount> counts;
  for (int i = 0; i < 2000; ++i) {
    counts.push_back({Date(2017, 1, 1).plus_days(i), rng.negative_binomial(30.0, 0.25)});
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_negbinom(counts));
  }
}
BENCHMARK(BM_NegBinomFit);

void BM_PredictAll(benchmark::State& state) {
  Rng rng(3);
  std::vector<GsrRecord> gsr;
  for (int day = 0; day < 200; ++day) {
    for (const char* city : {"Adelaide", "Brisbane", "Melbourne", "Sydney"}) {
      gsr.push_back({Date(2018, 1, 1).plus_days(day), city, rng.uniform() < 0.15, "", {}});
    }
  }
  JarGrid jars = build_jar_grid(gsr);
  for (auto& [key, jar] : jars) {
    jar.indicative_count = static_cast<std::int64_t>(rng.below(40));
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        predict_all(gsr, jars, StrataScheme::location_month, CountMode::days, 0.24));
  }
}
BENCHMARK(BM_PredictAll);

void BM_Sha256(benchmark::State& state) {
  std::string data(static_cast<std::size_t>(state.range(0)), 'x');
  for (auto _ : state) {
    benchmark::DoNotOptimize(Sha256::hex_digest(data));
  }
  state.SetBytesProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Sha256)->Arg(1 << 20);

}  // namespace

BENCHMARK_MAIN();
