#include <benchmark/benchmark.h>

#include <random>

#include "engage/ident.hpp"
#include "engage/mockgraph.hpp"
#include "engage/resolve.hpp"
#include "engage/stats.hpp"

using namespace engage;

static void BM_ExpandUrls(benchmark::State& state) {
  IdBundle b{Doi::parse("10.1371/journal.pone.0150000"), "26727500", "PMC4699458", "", parse_date("2016-01-01")};
  for (auto _ : state) benchmark::DoNotOptimize(expand_urls(b));
}
BENCHMARK(BM_ExpandUrls);

static void BM_Canonicalize(benchmark::State& state) {
  FixtureWorld w;
  for (int i = 0; i < 5; ++i) {
    w.redirects["https://e.org/r" + std::to_string(i)] = "https://e.org/r" + std::to_string(i + 1);
  }
  for (auto _ : state) benchmark::DoNotOptimize(canonicalize("http://www.e.org/r0/", w.rules, w));
}
BENCHMARK(BM_Canonicalize);

static void BM_AggregateArticle(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::vector<GraphObjectResult> rs;
  for (int i = 0; i < 10; ++i) {
    std::string url = "u" + std::to_string(i);
    rs.push_back({url, GraphObject{"o" + std::to_string(rng() % 4), url, {rng() % 50, rng() % 9, 1, 0}, {}}});
  }
  auto doi = Doi::parse("10.1/a");
  auto snap = parse_date("2017-10-09");
  for (auto _ : state) benchmark::DoNotOptimize(aggregate_article(doi, rs, std::nullopt, snap));
}
BENCHMARK(BM_AggregateArticle);

namespace {

MetricVector sample_vector(std::size_t universe, double coverage, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution covered(coverage);
  std::lognormal_distribution<double> count(0.8, 1.2);
  MetricVector v{Metric::aes, {}, universe};
  for (std::size_t i = 0; i < universe; ++i) {
    if (covered(rng)) v.values["10.1371/journal.pone." + std::to_string(1000000 + i)] = 1 + static_cast<std::uint64_t>(count(rng));
  }
  return v;
}

}  // namespace

static void BM_SpearmanZeroImputed(benchmark::State& state) {
  auto n = static_cast<std::size_t>(state.range(0));
  auto a = sample_vector(n, 0.35, 1);
  auto b = sample_vector(n, 0.16, 2);
  for (auto _ : state) benchmark::DoNotOptimize(spearman_zero_imputed(a, b));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SpearmanZeroImputed)->Arg(1000)->Arg(10000)->Arg(61848)->Complexity();

static void BM_LogBinAndFit(benchmark::State& state) {
  auto counts = sample_vector(static_cast<std::size_t>(state.range(0)), 1.0, 3).counts();
  for (auto _ : state) benchmark::DoNotOptimize(fit_power_law(log_bin(counts, 5, 0.11)));
}
BENCHMARK(BM_LogBinAndFit)->Arg(21415);

static void BM_LetterValues(benchmark::State& state) {
  std::mt19937_64 rng(4);
  std::geometric_distribution<int> g(0.3);
  std::vector<double> xs(static_cast<std::size_t>(state.range(0)));
  for (auto& x : xs) x = g(rng);
  for (auto _ : state) benchmark::DoNotOptimize(letter_values(xs));
}
BENCHMARK(BM_LetterValues)->Arg(7716);

BENCHMARK_MAIN();
