#pragma once

#include <cstdint>
#include <list>
#include <memory>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "pfcs/types.hpp"

namespace pfcs {

// Composites up to this value are answered from the smallest-prime-factor table.
inline constexpr std::uint32_t kSpfBound = 1'000'000;
// Stage 1 trial divides by primes up to this value (and up to sqrt(c)).
inline constexpr std::uint32_t kTrialDivisionBound = 1'000;
// Share of the step budget stage 1 may consume, as numerator / denominator.
inline constexpr std::uint64_t kTrialShareNum = 7;
inline constexpr std::uint64_t kTrialShareDen = 10;

inline constexpr std::size_t kDefaultFactorCacheCapacity = std::size_t{1} << 16;
inline constexpr std::uint64_t kDefaultRhoSeed = 0x9f1c0ffee0ddf00dULL;

class InvalidComposite : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// factors (ascending, with multiplicity) * remainder == the factorized value.
// complete <=> remainder == 1.
struct Factorization {
  std::vector<BigInt> factors;
  BigInt remainder{1};
  bool complete = true;
  std::uint64_t steps = 0;

  BigInt product() const;  // of `factors` only; times remainder gives the input

  friend bool operator==(const Factorization& a, const Factorization& b) {
    return a.factors == b.factors && a.remainder == b.remainder && a.complete == b.complete;
  }
};

// Smallest prime factor of every 2 <= n <= bound. Immutable once built.
class SpfTable {
 public:
  explicit SpfTable(std::uint32_t bound = kSpfBound);

  // Process-wide table with the default bound, built on first use.
  static std::shared_ptr<const SpfTable> shared();

  std::uint32_t bound() const noexcept { return bound_; }
  std::uint32_t spf(std::uint32_t n) const noexcept { return spf_[n]; }
  bool contains(std::uint64_t n) const noexcept { return n >= 2 && n <= bound_; }

  // Prime factors of n (2 <= n <= bound), ascending with multiplicity.
  std::vector<std::uint32_t> factor(std::uint32_t n) const;

 private:
  std::uint32_t bound_;
  std::vector<std::uint32_t> spf_;
};

SpfTable build_spf_table();

struct RhoResult {
  std::optional<BigInt> factor;  // 1 < factor < n when present
  std::uint64_t steps = 0;
};

// Brent's variant with batched gcd. n must be odd, composite, and not a
// perfect power for a factor to be found; otherwise the budget runs out.
// Deterministic in (n, budget, seed).
RhoResult pollard_rho(const BigInt& n, StepBudget budget, std::uint64_t seed);

// Bounded map from composite to factorization with least-recently-used
// eviction. Entries remember the budget they were computed with so an
// incomplete result is retried when a larger budget arrives.
class FactorizationCache {
 public:
  explicit FactorizationCache(std::size_t capacity = kDefaultFactorCacheCapacity);

  // Refreshes recency on a hit.
  std::optional<Factorization> get(const BigInt& c);
  // Entry usable for a request with `budget`: complete, or computed with at least that budget.
  const Factorization* lookup(const BigInt& c, StepBudget budget);
  void put(const BigInt& c, Factorization f, StepBudget budget);

  std::size_t size() const noexcept { return index_.size(); }
  std::size_t capacity() const noexcept { return capacity_; }

 private:
  struct Entry {
    BigInt key;
    Factorization value;
    std::uint64_t budget;
  };

  std::size_t capacity_;
  std::list<Entry> order_;  // front = most recent
  std::unordered_map<BigInt, std::list<Entry>::iterator, BigIntHash> index_;
};

// Multi-stage factorization: table lookup for c <= 10^6, then the cache, then
// trial division by primes <= min(1000, sqrt(c)) within 70% of the budget,
// then Pollard rho on the rest within what remains. Factors are verified
// prime. Running out of budget leaves the unresolved part in `remainder`.
Factorization factorize(const BigInt& c, StepBudget budget, FactorizationCache& cache,
                        const SpfTable& spf, std::uint64_t seed = kDefaultRhoSeed);

struct FactorizerStats {
  std::uint64_t calls = 0;
  std::uint64_t table_lookups = 0;
  std::uint64_t cache_hits = 0;
  std::uint64_t computed = 0;
  std::uint64_t incomplete = 0;
};

// Owns a cache and a seed; shares the SPF table.
class Factorizer {
 public:
  explicit Factorizer(std::shared_ptr<const SpfTable> spf = SpfTable::shared(),
                      std::size_t cache_capacity = kDefaultFactorCacheCapacity,
                      std::uint64_t seed = kDefaultRhoSeed);

  Factorization factorize(const BigInt& c, StepBudget budget);

  const SpfTable& spf() const noexcept { return *spf_; }
  FactorizationCache& cache() noexcept { return cache_; }
  const FactorizerStats& stats() const noexcept { return stats_; }
  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::shared_ptr<const SpfTable> spf_;
  FactorizationCache cache_;
  std::uint64_t seed_;
  FactorizerStats stats_;
};

}  // namespace pfcs
