#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "pfcs/factorizer.hpp"
#include "pfcs/primes.hpp"

using namespace pfcs;

namespace {

// Products of `arity` primes drawn from [lo, lo + span).
std::vector<BigInt> composites(std::uint64_t lo, std::uint64_t span, int arity, int count) {
  const auto primes = sieve_primes(lo, lo + span);
  std::mt19937_64 rng(1);
  std::vector<BigInt> out;
  for (int i = 0; i < count; ++i) {
    BigInt c = 1;
    for (int j = 0; j < arity; ++j) c *= from_u64(primes[rng() % primes.size()]);
    out.push_back(c);
  }
  return out;
}

void BM_TableLookup(benchmark::State& state) {
  Factorizer f;
  std::uint64_t n = 2;
  for (auto _ : state) {
    benchmark::DoNotOptimize(f.factorize(from_u64(n), StepBudget{0}));
    n = n % 999'000 + 7;
  }
}
BENCHMARK(BM_TableLookup);

void BM_FactorizeCold(benchmark::State& state) {
  const auto lo = static_cast<std::uint64_t>(state.range(0));
  const int arity = static_cast<int>(state.range(1));
  const auto inputs = composites(lo, 60'000, arity, 256);
  std::size_t i = 0;
  for (auto _ : state) {
    Factorizer f(SpfTable::shared(), 1);  // tiny cache so every call recomputes
    benchmark::DoNotOptimize(f.factorize(inputs[i++ % inputs.size()], StepBudget{10'000'000}));
  }
}
BENCHMARK(BM_FactorizeCold)
    ->Args({1'009, 2})
    ->Args({100'003, 2})
    ->Args({100'003, 8})
    ->Args({10'000'019, 2})
    ->Args({10'000'019, 4});

void BM_FactorizeCached(benchmark::State& state) {
  const auto inputs = composites(100'003, 60'000, 4, 256);
  Factorizer f;
  for (const auto& c : inputs) f.factorize(c, StepBudget{10'000'000});
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(f.factorize(inputs[i++ % inputs.size()], StepBudget{10'000'000}));
  }
}
BENCHMARK(BM_FactorizeCached);

void BM_PollardRho(benchmark::State& state) {
  const BigInt n = BigInt("1000000007") * BigInt("998244353");
  for (auto _ : state) benchmark::DoNotOptimize(pollard_rho(n, StepBudget{10'000'000}, kDefaultRhoSeed));
}
BENCHMARK(BM_PollardRho);

}  // namespace
