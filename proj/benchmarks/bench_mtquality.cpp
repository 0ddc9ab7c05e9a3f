#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "senseprobe/mtquality.hpp"

using namespace senseprobe;

namespace {

std::vector<std::string> corpus(std::size_t n, int shift) {
  static const char* words[] = {"the", "river", "is", "a", "tributary", "of", "in", "romania", "bank", "left"};
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::string s;
    for (std::size_t w = 0; w < 20; ++w) {
      if (!s.empty()) s += ' ';
      s += words[(i * 7 + w * 3 + static_cast<std::size_t>(shift) * (w % 4 == 0)) % 10];
    }
    out.push_back(s);
  }
  return out;
}

}  // namespace

static void BM_CorpusBleu(benchmark::State& state) {
  const auto hyps = corpus(static_cast<std::size_t>(state.range(0)), 1);
  const auto refs = corpus(static_cast<std::size_t>(state.range(0)), 0);
  for (auto _ : state) benchmark::DoNotOptimize(mtquality::corpus_bleu(hyps, refs));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CorpusBleu)->Arg(500);

static void BM_ScoreCorpus(benchmark::State& state) {
  const auto hyps = corpus(static_cast<std::size_t>(state.range(0)), 1);
  const auto refs = corpus(static_cast<std::size_t>(state.range(0)), 0);
  for (auto _ : state) benchmark::DoNotOptimize(mtquality::score_corpus(hyps, refs));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ScoreCorpus)->Arg(500);
