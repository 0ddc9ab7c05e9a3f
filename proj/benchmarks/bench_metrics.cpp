#include <benchmark/benchmark.h>

#include <string>

#include "senseprobe/metrics.hpp"
#include "senseprobe/rng.hpp"

using namespace senseprobe;

namespace {

struct Fixture {
  Task task;
  metrics::ScoredRun a, b;
};

Fixture make(std::size_t n) {
  Fixture f;
  f.task.spec.kind = TaskKind::OpenQa;
  f.a.kind = f.b.kind = TaskKind::OpenQa;
  SplitMix64 rng(n);
  for (std::size_t i = 0; i < n; ++i) {
    Datapoint dp;
    dp.dp_id = "d" + std::to_string(100000 + i);
    dp.gold = AnswerClass::from_variants({"berlin", "berlijn", "berlino"});
    dp.variant_classes = {AnswerClass::from_variants({"bonn"})};
    f.task.datapoints.push_back(dp);
    const char* replies[] = {"berlin", "berlino", "bonn", "paris"};
    f.a.items.push_back({dp.dp_id, false, matching::normalize(replies[rng.uniform(0, 3)]), std::nullopt, ""});
    f.b.items.push_back({dp.dp_id, false, matching::normalize(replies[rng.uniform(0, 3)]), std::nullopt, ""});
  }
  return f;
}

}  // namespace

static void BM_Consistency(benchmark::State& state) {
  const Fixture f = make(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(metrics::consistency(f.a, f.b, f.task));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Consistency)->Arg(500)->Arg(5000);

static void BM_Conditional(benchmark::State& state) {
  const Fixture f = make(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(metrics::conditional_consistency(f.a, f.b, f.task));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Conditional)->Arg(500);
