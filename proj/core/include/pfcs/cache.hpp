#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "pfcs/assignment.hpp"
#include "pfcs/factorizer.hpp"
#include "pfcs/policy.hpp"
#include "pfcs/primes.hpp"
#include "pfcs/relations.hpp"
#include "pfcs/types.hpp"

namespace pfcs {

struct LevelConfig {
  Level level = Level::L1;
  std::size_t capacity = 1;  // ignored for the memory level
  PrimeRange range;
  StepBudget budget;

  friend bool operator==(const LevelConfig&, const LevelConfig&) = default;
};

// Capacities 64/512/4096, budgets 0/10^3/10^5/10^6, default prime ranges.
std::array<LevelConfig, kNumLevels> default_level_configs();

struct PfcsConfig {
  std::array<LevelConfig, kNumLevels> levels = default_level_configs();
  std::size_t prefetch_cap = 8;
  std::size_t arity_cap = kDefaultArityCap;
  double alpha = 0.8;
  RangeThresholds thresholds;
  double recycle_fraction = 0.1;
  std::size_t factor_cache_capacity = kDefaultFactorCacheCapacity;
  std::uint64_t seed = kDefaultRhoSeed;
  std::uint64_t segment_size = kDefaultSegmentSize;

  AssignmentConfig assignment_config() const;
};

struct CacheEntry {
  ElementId element{};
  Prime prime = 0;
  std::uint64_t last_access = 0;
  bool prefetched = false;  // filled by prefetch and not yet demanded
  std::size_t rel_degree = 0;
};

using PrefetchObserver = std::function<void(ElementId trigger, ElementId fetched)>;

// Inclusive L1/L2/L3 hierarchy running the prime-factorization policy.
//
// Every resident element owns a prime. Accesses consult L1 -> L2 -> L3 and
// promote hits to L1. After each access the element's registered composites
// are factorized and their other members prefetched into the level their
// prime's range names (clamped to L3). Eviction removes the entry with the
// smallest (rel_degree, last_access, demand flag).
//
// Strictly single-threaded.
class PfcsCache final : public ReplacementPolicy {
 public:
  explicit PfcsCache(PfcsConfig config = {},
                     std::shared_ptr<const SpfTable> spf = SpfTable::shared());
  PfcsCache(const PfcsCache&) = delete;
  PfcsCache& operator=(const PfcsCache&) = delete;

  std::string_view name() const override { return "pfcs"; }
  AccessOutcome access(ElementId d) override { return lookup(d); }
  void relate(std::span<const ElementId> members) override;
  SimStats stats() const override { return stats_; }
  bool contains(ElementId d) const override;
  std::size_t resident_count() const override;
  std::optional<std::string> check_invariants() const override;

  AccessOutcome lookup(ElementId d);
  std::vector<ElementId> prefetch(ElementId d);
  std::optional<ElementId> evict(Level level);
  SimStats report() const { return stats_; }

  // Highest (fastest) level holding d.
  std::optional<Level> resident_level(ElementId d) const;
  const CacheEntry* entry(Level level, ElementId d) const;
  // Snapshot of one level, in eviction order (next victim first).
  std::vector<CacheEntry> entries(Level level) const;
  std::size_t level_size(Level level) const;
  std::array<std::uint64_t, kNumCacheLevels> level_hits() const noexcept { return level_hits_; }
  std::uint64_t rejected_groups() const noexcept { return rejected_groups_; }
  std::uint64_t tick() const noexcept { return tick_; }

  void set_prefetch_observer(PrefetchObserver observer) { observer_ = std::move(observer); }

  const PfcsConfig& config() const noexcept { return config_; }
  AssignmentTable& table() noexcept { return table_; }
  RelationRegistry& registry() noexcept { return registry_; }
  Factorizer& factorizer() noexcept { return factorizer_; }

 private:
  // (rel_degree, last_access, demand flag, key): unused prefetches sort first
  // among equal (rel_degree, last_access).
  using EvictKey = std::tuple<std::size_t, std::uint64_t, std::uint8_t, std::uint64_t>;

  struct LevelState {
    std::size_t capacity = 0;
    std::unordered_map<ElementId, CacheEntry> entries;
    std::set<EvictKey> order;
  };

  static EvictKey key_of_entry(const CacheEntry& e) {
    return {e.rel_degree, e.last_access, e.prefetched ? 0 : 1, key_of(e.element)};
  }

  LevelState& state(Level level) { return levels_[index_of(level)]; }
  const LevelState& state(Level level) const { return levels_[index_of(level)]; }

  void put(Level level, const CacheEntry& entry);
  void erase(Level level, ElementId d);
  void remove_everywhere(ElementId d);
  void update_everywhere(ElementId d, const std::function<void(CacheEntry&)>& fn);
  void refresh_degree(ElementId d);
  // Evicts from `level` and every faster level; counts an eviction at L3.
  ElementId evict_victim(Level level);
  bool try_prefetch(ElementId e, Prime prime);
  Prime ensure_prime(ElementId d, Level level, std::size_t expected_relationships);
  void handle_recycled(const std::vector<std::pair<ElementId, Prime>>& recycled);

  PfcsConfig config_;
  AssignmentTable table_;
  Factorizer factorizer_;
  RelationRegistry registry_;
  std::array<LevelState, kNumCacheLevels> levels_;
  SimStats stats_;
  std::array<std::uint64_t, kNumCacheLevels> level_hits_{};
  std::uint64_t rejected_groups_ = 0;
  std::uint64_t tick_ = 0;
  PrefetchObserver observer_;
};

}  // namespace pfcs
