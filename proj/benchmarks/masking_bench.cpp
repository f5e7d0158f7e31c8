#include <benchmark/benchmark.h>

#include "bench_common.hpp"
#include "ombudsman/masking/mask.hpp"
#include "ombudsman/masking/ner.hpp"

using namespace ombudsman;

static void BM_GazetteerMask(benchmark::State& state) {
  auto posts = bench::make_posts(static_cast<std::size_t>(state.range(0)), 5);
  masking::GazetteerNer ner;
  for (auto _ : state) {
    std::size_t spans = 0;
    for (const auto& p : posts) spans += masking::mask_text(p.text, ner).span_count;
    benchmark::DoNotOptimize(spans);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GazetteerMask)->Arg(1000)->Unit(benchmark::kMillisecond);

static void BM_GazetteerConstruct(benchmark::State& state) {
  for (auto _ : state) {
    masking::GazetteerNer ner;
    benchmark::DoNotOptimize(ner.identifier());
  }
}
BENCHMARK(BM_GazetteerConstruct)->Unit(benchmark::kMillisecond);
