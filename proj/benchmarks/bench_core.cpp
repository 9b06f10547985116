#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "uqsup/metrics.hpp"
#include "uqsup/quantifiers.hpp"
#include "uqsup/supervisor.hpp"
#include "uqsup/synthgen.hpp"

namespace {

const uqsup::SyntheticSet& dump() {
  static const uqsup::SyntheticSet set = [] {
    uqsup::GeneratorConfig cfg;
    cfg.inputs = 10000;
    cfg.samples = 20;
    cfg.classes = 10;
    cfg.mislabel_link = 0.5;
    return uqsup::generate(cfg);
  }();
  return set;
}

void BM_Quantify(benchmark::State& state) {
  const auto q = static_cast<uqsup::Quantifier>(state.range(0));
  const auto& set = dump();
  uqsup::QuantifierSpec spec{q};
  if (uqsup::is_point_quantifier(q)) spec.sample_prefix = 1;
  for (auto _ : state) {
    auto out = uqsup::quantify(set.tensor, spec);
    benchmark::DoNotOptimize(out.items.data());
  }
  state.SetLabel(std::string(uqsup::to_string(q)));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(set.tensor.inputs()));
}
BENCHMARK(BM_Quantify)->DenseRange(0, 6)->Unit(benchmark::kMillisecond);

struct Scores {
  std::vector<double> values;
  std::vector<bool> malicious;
};

Scores scores(std::size_t n) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal;
  Scores s;
  for (std::size_t i = 0; i < n; ++i) {
    const bool bad = i % 5 == 0;
    s.malicious.push_back(bad);
    s.values.push_back(std::round((normal(rng) + (bad ? 1.0 : 0.0)) * 100) / 100);
  }
  return s;
}

void BM_Auroc(benchmark::State& state) {
  const auto s = scores(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(uqsup::auroc(s.values, s.malicious));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Auroc)->RangeMultiplier(10)->Range(1000, 1000000)->Complexity();

void BM_AveragePrecision(benchmark::State& state) {
  const auto s = scores(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(uqsup::average_precision(s.values, s.malicious));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_AveragePrecision)->RangeMultiplier(10)->Range(1000, 1000000)->Complexity();

void BM_Calibrate(benchmark::State& state) {
  const auto s = scores(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(uqsup::calibrate_threshold(s.values, 0.05));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Calibrate)->RangeMultiplier(10)->Range(1000, 1000000)->Complexity();

}  // namespace

BENCHMARK_MAIN();
