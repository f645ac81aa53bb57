#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

#include "pfcs/types.hpp"

namespace pfcs {

inline constexpr std::uint64_t kDefaultSegmentSize = std::uint64_t{1} << 16;

class SegmentTooLarge : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class UnknownPrime : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Closed interval [lo, hi]; an absent hi means unbounded (up to 2^64 - 1).
struct PrimeRange {
  std::uint64_t lo = 2;
  std::optional<std::uint64_t> hi;

  static PrimeRange bounded(std::uint64_t lo, std::uint64_t hi) { return {lo, hi}; }
  static PrimeRange unbounded(std::uint64_t lo) { return {lo, std::nullopt}; }

  std::uint64_t upper() const noexcept {
    return hi.value_or(std::numeric_limits<std::uint64_t>::max());
  }
  bool contains(std::uint64_t value) const noexcept { return value >= lo && value <= upper(); }
  bool overlaps(const PrimeRange& other) const noexcept {
    return lo <= other.upper() && other.lo <= upper();
  }

  friend bool operator==(const PrimeRange&, const PrimeRange&) = default;
};

// Default per-level ranges: L1 2-997, L2 1009-99991, L3 100003-9999991, memory 10000019+.
PrimeRange default_range(Level level) noexcept;

// Primes in [lo, hi], ascending. Throws SegmentTooLarge when hi - lo exceeds max_span,
// std::invalid_argument when lo < 2 or lo > hi.
std::vector<Prime> sieve_primes(std::uint64_t lo, std::uint64_t hi,
                                std::uint64_t max_span = kDefaultSegmentSize);

// Deterministic for every 64-bit input.
bool is_prime(std::uint64_t n) noexcept;

// Exact below 2^64; above, 40 Miller-Rabin rounds with bases drawn from a fixed seed.
bool is_prime(const BigInt& n);

// Primes of one level's range. The free set is materialised lazily, one sieve
// segment at a time, so unbounded ranges never need to be enumerated.
//
// Single writer: no concurrent mutation.
class PrimePool {
 public:
  PrimePool(Level level, PrimeRange range, std::uint64_t segment_size = kDefaultSegmentSize);

  // Smallest free prime, or nullopt once the bounded range is fully allocated.
  std::optional<Prime> allocate();

  // Returns up to `count` allocated primes with the oldest use ordinal to the
  // free set (ties: smallest prime first). The result is in reclaim order.
  std::vector<Prime> recycle_lru(std::size_t count);

  // Marks p as most recently used. Throws UnknownPrime if p is not allocated.
  void touch(Prime p);

  // Returns one allocated prime to the free set. Throws UnknownPrime.
  void release(Prime p);

  // Allocates a specific free prime. Sieves forward up to p if needed, so
  // claiming far into an unbounded range is proportionally expensive.
  bool claim(Prime p);

  bool is_allocated(Prime p) const noexcept { return allocated_.contains(p); }
  std::size_t allocated_count() const noexcept { return allocated_.size(); }
  std::size_t free_count() const noexcept { return free_.size(); }
  // True when every prime of a bounded range has been materialised.
  bool fully_sieved() const noexcept { return sieve_done_; }

  Level level() const noexcept { return level_; }
  const PrimeRange& range() const noexcept { return range_; }

  // Use ordinal of an allocated prime (for tests and audits).
  std::optional<std::uint64_t> ordinal_of(Prime p) const;

 private:
  bool extend();

  Level level_;
  PrimeRange range_;
  std::uint64_t segment_size_;
  std::uint64_t cursor_;
  bool sieve_done_ = false;
  std::uint64_t next_ordinal_ = 0;

  std::set<Prime> free_;
  std::unordered_map<Prime, std::uint64_t> allocated_;
  std::set<std::pair<std::uint64_t, Prime>> by_age_;
};

}  // namespace pfcs
