#include <benchmark/benchmark.h>

#include "senseprobe/numerals.hpp"

using namespace senseprobe;

// The full 1..2000 x 5 languages round trip; must stay well under a second.
static void BM_RoundTripAll(benchmark::State& state) {
  for (auto _ : state) {
    int sum = 0;
    for (Language lang : kAllLanguages)
      for (int n = 1; n <= 2000; ++n) sum += numerals::parse_number(numerals::spell_number(n, lang), lang);
    benchmark::DoNotOptimize(sum);
  }
  state.SetItemsProcessed(state.iterations() * 10000);
}
BENCHMARK(BM_RoundTripAll)->Unit(benchmark::kMillisecond);

static void BM_Parse(benchmark::State& state) {
  const auto lang = static_cast<Language>(state.range(0));
  const std::string words = numerals::spell_number(1777, lang);
  for (auto _ : state) benchmark::DoNotOptimize(numerals::parse_number(words, lang));
  state.SetLabel(std::string(to_code(lang)));
}
BENCHMARK(BM_Parse)->DenseRange(0, 4);
