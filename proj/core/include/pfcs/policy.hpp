#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "pfcs/types.hpp"

namespace pfcs {

// Count-only simulation statistics shared by every policy.
struct SimStats {
  std::uint64_t accesses = 0;
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
  std::uint64_t prefetch_issued = 0;
  std::uint64_t prefetch_used = 0;
  std::uint64_t evictions = 0;
  std::uint64_t factorizations = 0;
  std::uint64_t budget_exhaustions = 0;

  double hit_rate() const noexcept {
    return accesses == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(accesses);
  }

  SimStats& operator+=(const SimStats& other) noexcept;
  friend bool operator==(const SimStats&, const SimStats&) = default;
};

enum class AccessOutcome : std::uint8_t { Miss, Hit };

class ReplacementPolicy {
 public:
  virtual ~ReplacementPolicy() = default;

  virtual std::string_view name() const = 0;
  // One demand access.
  virtual AccessOutcome access(ElementId d) = 0;
  // Relationship announcement from the trace; ignored by policies without relationship support.
  virtual void relate(std::span<const ElementId> /*members*/) {}

  virtual SimStats stats() const = 0;
  virtual bool contains(ElementId d) const = 0;
  virtual std::size_t resident_count() const = 0;

  // Structural self-check; returns a description of the first violation.
  virtual std::optional<std::string> check_invariants() const { return std::nullopt; }
};

}  // namespace pfcs
