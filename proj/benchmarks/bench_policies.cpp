#include <benchmark/benchmark.h>

#include <memory>
#include <string>
#include <vector>

#include "pfcs/baselines.hpp"
#include "pfcs/cache.hpp"
#include "pfcs/workloads.hpp"

using namespace pfcs;

namespace {

std::vector<TraceEvent> trace(Generator g) {
  WorkloadSpec spec;
  spec.generator = g;
  spec.n_elements = 3000;
  spec.n_events = 30'000;
  return generate(spec);
}

std::unique_ptr<ReplacementPolicy> make(int which, std::size_t capacity) {
  if (which == 0) {
    PfcsConfig c;
    c.levels[index_of(Level::L1)].capacity = capacity / 8;
    c.levels[index_of(Level::L2)].capacity = capacity / 2;
    c.levels[index_of(Level::L3)].capacity = capacity;
    return std::make_unique<PfcsCache>(c);
  }
  static const char* names[] = {"", "lru", "arc", "lirs"};
  return make_baseline(names[which], capacity);
}

// Whole-trace replay; items processed counts events.
void BM_Replay(benchmark::State& state) {
  const auto events = trace(static_cast<Generator>(state.range(1)));
  const auto which = static_cast<int>(state.range(0));
  double hit_rate = 0.0;
  for (auto _ : state) {
    auto policy = make(which, 750);
    for (const auto& ev : events) {
      if (ev.kind == EventKind::Access) policy->access(ev.key);
      else policy->relate(ev.keys);
    }
    hit_rate = policy->stats().hit_rate();
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(events.size()));
  state.counters["hit_rate"] = hit_rate;
  state.SetLabel(std::string(make(which, 8)->name()) + "/" +
                 std::string(generator_name(static_cast<Generator>(state.range(1)))));
}
BENCHMARK(BM_Replay)
    ->ArgsProduct({{0, 1, 2, 3},
                   {static_cast<int>(Generator::Zipf), static_cast<int>(Generator::Join)}})
    ->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
