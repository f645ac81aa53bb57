#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "pfcs/primes.hpp"
#include "pfcs/types.hpp"

namespace pfcs {

// Decayed access-frequency summary of one element.
struct AccessStats {
  double ewma = 0.0;
  std::uint64_t last_seen = 0;
};

// ewma * alpha^(now - last_seen). Pure.
double predict_frequency(const AccessStats& stats, std::uint64_t now, double alpha) noexcept;

// Folds one access at `now` into the summary.
void record_access(AccessStats& stats, std::uint64_t now, double alpha) noexcept;

struct RangeThresholds {
  double hot = 4.0;
  double warm = 1.0;

  friend bool operator==(const RangeThresholds&, const RangeThresholds&) = default;
};

// Hot -> L1, warm -> L2, cold with relationships -> L3, otherwise memory.
// The budget is accepted for interface parity but does not change the choice.
Level select_range(double frequency, std::size_t relationships, StepBudget budget,
                   const RangeThresholds& thresholds) noexcept;

struct AssignmentConfig {
  std::array<PrimeRange, kNumLevels> ranges{default_range(Level::L1), default_range(Level::L2),
                                            default_range(Level::L3),
                                            default_range(Level::Memory)};
  std::array<StepBudget, kNumLevels> budgets{StepBudget{0}, StepBudget{1'000},
                                             StepBudget{100'000}, StepBudget{1'000'000}};
  RangeThresholds thresholds;
  double alpha = 0.8;
  double recycle_fraction = 0.1;
  std::uint64_t segment_size = kDefaultSegmentSize;
};

class AssignmentFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Assignment {
  Prime prime = 0;
  Level level = Level::Memory;
  bool fresh = false;  // false when the element already had a prime
  // Elements whose mapping was invalidated by pool recycling during this call.
  std::vector<std::pair<ElementId, Prime>> recycled;
};

// Bidirectional element <-> prime map over one pool per level.
//
// Single writer; concurrent readers are fine when no writer is active.
class AssignmentTable {
 public:
  explicit AssignmentTable(AssignmentConfig config = {});

  // Idempotent for an already mapped element. Otherwise predicts frequency,
  // selects a range, allocates, and on exhaustion recycles
  // ceil(recycle_fraction * allocated) primes of that pool and retries once.
  // `level` is the cache level the request originates from.
  Assignment assign_prime(ElementId d, Level level, std::uint64_t now,
                          std::size_t expected_relationships = 0);

  // Binds d to a specific prime of its level's range (fixtures, replays).
  // Throws std::invalid_argument if p is not a free prime of any pool or d is mapped.
  void bind(ElementId d, Prime p);

  // Removes both directions and returns the prime to its pool.
  std::optional<Prime> release_element(ElementId d);

  void record_access(ElementId d, std::uint64_t now);
  // Refreshes the recency of d's prime in its pool; no-op when unmapped.
  void touch(ElementId d);

  std::optional<Prime> prime_of(ElementId d) const;
  std::optional<ElementId> element_of(Prime p) const;
  double predicted_frequency(ElementId d, std::uint64_t now) const;

  std::size_t relationship_count(ElementId d) const;
  void add_relationship(ElementId d);
  void remove_relationship(ElementId d);

  StepBudget factorization_budget(Level level) const noexcept {
    return config_.budgets[index_of(level)];
  }
  std::optional<Level> level_of(Prime p) const noexcept;

  PrimePool& pool(Level level) noexcept { return pools_[index_of(level)]; }
  const PrimePool& pool(Level level) const noexcept { return pools_[index_of(level)]; }
  const AssignmentConfig& config() const noexcept { return config_; }
  std::size_t size() const noexcept { return data_to_prime_.size(); }

  // Checks the bijection and pool bookkeeping; returns a description of the
  // first violation found.
  std::optional<std::string> audit() const;

 private:
  AssignmentConfig config_;
  std::array<PrimePool, kNumLevels> pools_;
  std::unordered_map<ElementId, Prime> data_to_prime_;
  std::unordered_map<Prime, ElementId> prime_to_data_;
  std::unordered_map<ElementId, AccessStats> stats_;
  std::unordered_map<ElementId, std::size_t> rel_count_;
};

}  // namespace pfcs
