#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>

#include <gmpxx.h>

namespace pfcs {

// Application-level key of a cached data element.
enum class ElementId : std::uint64_t {};

constexpr ElementId element(std::uint64_t key) noexcept { return ElementId{key}; }
constexpr std::uint64_t key_of(ElementId id) noexcept { return static_cast<std::uint64_t>(id); }

// Pool primes are capped at 64 bits. Composites are arbitrary precision.
using Prime = std::uint64_t;
using BigInt = mpz_class;

// Cache levels in lookup order. Memory is the backing store, not a cache.
enum class Level : std::uint8_t { L1 = 0, L2 = 1, L3 = 2, Memory = 3 };

inline constexpr std::size_t kNumLevels = 4;
inline constexpr std::size_t kNumCacheLevels = 3;
inline constexpr std::array<Level, kNumLevels> kAllLevels{Level::L1, Level::L2, Level::L3,
                                                          Level::Memory};

constexpr std::size_t index_of(Level level) noexcept { return static_cast<std::size_t>(level); }

constexpr std::string_view level_name(Level level) noexcept {
  switch (level) {
    case Level::L1: return "L1";
    case Level::L2: return "L2";
    case Level::L3: return "L3";
    case Level::Memory: return "memory";
  }
  return "?";
}

std::optional<Level> parse_level(std::string_view name) noexcept;

// Deterministic work allowance for factorization: one trial division or one
// Pollard rho iteration costs one step. Zero means lookup-table only.
struct StepBudget {
  std::uint64_t max_steps = 0;

  friend bool operator==(const StepBudget&, const StepBudget&) = default;
};

// Hash for mpz_class keys (gmpxx ships none).
struct BigIntHash {
  std::size_t operator()(const BigInt& value) const noexcept;
};

bool fits_u64(const BigInt& value) noexcept;
std::uint64_t to_u64(const BigInt& value) noexcept;
BigInt from_u64(std::uint64_t value);

}  // namespace pfcs
