#include "pfcs/cache.hpp"

#include <algorithm>
#include <unordered_set>

namespace pfcs {
namespace {

constexpr std::array<Level, kNumCacheLevels> kCacheLevels{Level::L1, Level::L2, Level::L3};

Level clamp_to_cache(Level level) { return level == Level::Memory ? Level::L3 : level; }

}  // namespace

std::array<LevelConfig, kNumLevels> default_level_configs() {
  return {LevelConfig{Level::L1, 64, default_range(Level::L1), StepBudget{0}},
          LevelConfig{Level::L2, 512, default_range(Level::L2), StepBudget{1'000}},
          LevelConfig{Level::L3, 4096, default_range(Level::L3), StepBudget{100'000}},
          LevelConfig{Level::Memory, 0, default_range(Level::Memory), StepBudget{1'000'000}}};
}

AssignmentConfig PfcsConfig::assignment_config() const {
  AssignmentConfig out;
  for (std::size_t i = 0; i < kNumLevels; ++i) {
    out.ranges[i] = levels[i].range;
    out.budgets[i] = levels[i].budget;
  }
  out.thresholds = thresholds;
  out.alpha = alpha;
  out.recycle_fraction = recycle_fraction;
  out.segment_size = segment_size;
  return out;
}

PfcsCache::PfcsCache(PfcsConfig config, std::shared_ptr<const SpfTable> spf)
    : config_(std::move(config)),
      table_(config_.assignment_config()),
      factorizer_(std::move(spf), config_.factor_cache_capacity, config_.seed),
      registry_(table_, factorizer_, config_.arity_cap) {
  for (std::size_t i = 0; i < kNumCacheLevels; ++i) {
    if (config_.levels[i].capacity == 0) {
      throw std::invalid_argument("PfcsCache: level capacities must be >= 1");
    }
    levels_[i].capacity = config_.levels[i].capacity;
  }
}

bool PfcsCache::contains(ElementId d) const { return state(Level::L3).entries.contains(d); }

std::size_t PfcsCache::resident_count() const { return state(Level::L3).entries.size(); }

std::optional<Level> PfcsCache::resident_level(ElementId d) const {
  for (Level level : kCacheLevels) {
    if (state(level).entries.contains(d)) return level;
  }
  return std::nullopt;
}

const CacheEntry* PfcsCache::entry(Level level, ElementId d) const {
  if (level == Level::Memory) return nullptr;
  const auto& entries = state(level).entries;
  auto it = entries.find(d);
  return it == entries.end() ? nullptr : &it->second;
}

std::vector<CacheEntry> PfcsCache::entries(Level level) const {
  std::vector<CacheEntry> out;
  if (level == Level::Memory) return out;
  const LevelState& s = state(level);
  for (const auto& key : s.order) out.push_back(s.entries.at(element(std::get<3>(key))));
  return out;
}

std::size_t PfcsCache::level_size(Level level) const {
  return level == Level::Memory ? 0 : state(level).entries.size();
}

void PfcsCache::put(Level level, const CacheEntry& entry) {
  LevelState& s = state(level);
  auto [it, inserted] = s.entries.try_emplace(entry.element, entry);
  if (!inserted) {
    s.order.erase(key_of_entry(it->second));
    it->second = entry;
  }
  s.order.insert(key_of_entry(entry));
}

void PfcsCache::erase(Level level, ElementId d) {
  LevelState& s = state(level);
  auto it = s.entries.find(d);
  if (it == s.entries.end()) return;
  s.order.erase(key_of_entry(it->second));
  s.entries.erase(it);
}

void PfcsCache::remove_everywhere(ElementId d) {
  for (Level level : kCacheLevels) erase(level, d);
}

void PfcsCache::update_everywhere(ElementId d, const std::function<void(CacheEntry&)>& fn) {
  for (Level level : kCacheLevels) {
    LevelState& s = state(level);
    auto it = s.entries.find(d);
    if (it == s.entries.end()) continue;
    s.order.erase(key_of_entry(it->second));
    fn(it->second);
    s.order.insert(key_of_entry(it->second));
  }
}

void PfcsCache::refresh_degree(ElementId d) {
  const std::size_t degree = table_.relationship_count(d);
  update_everywhere(d, [degree](CacheEntry& e) { e.rel_degree = degree; });
}

ElementId PfcsCache::evict_victim(Level level) {
  LevelState& s = state(level);
  const ElementId victim = element(std::get<3>(*s.order.begin()));
  for (Level inner : kCacheLevels) {
    erase(inner, victim);
    if (inner == level) break;
  }
  if (level == Level::L3) ++stats_.evictions;
  return victim;
}

std::optional<ElementId> PfcsCache::evict(Level level) {
  if (level == Level::Memory || state(level).entries.empty()) return std::nullopt;
  return evict_victim(level);
}

void PfcsCache::handle_recycled(const std::vector<std::pair<ElementId, Prime>>& recycled) {
  for (const auto& [gone, prime] : recycled) {
    std::unordered_set<ElementId> affected;
    for (const BigInt& composite : registry_.related_composites(prime)) {
      if (const RelationGroup* group = registry_.find(composite)) {
        affected.insert(group->members.begin(), group->members.end());
      }
    }
    registry_.purge_prime(prime);
    remove_everywhere(gone);
    for (ElementId d : affected) {
      if (d != gone) refresh_degree(d);
    }
  }
}

Prime PfcsCache::ensure_prime(ElementId d, Level level, std::size_t expected_relationships) {
  Assignment a = table_.assign_prime(d, level, tick_, expected_relationships);
  if (!a.recycled.empty()) handle_recycled(a.recycled);
  return a.prime;
}

AccessOutcome PfcsCache::lookup(ElementId d) {
  ++tick_;
  ++stats_.accesses;
  table_.record_access(d, tick_);

  AccessOutcome outcome;
  if (const auto found = resident_level(d)) {
    ++stats_.hits;
    ++level_hits_[index_of(*found)];
    const CacheEntry current = state(*found).entries.at(d);
    if (current.prefetched) ++stats_.prefetch_used;
    update_everywhere(d, [this](CacheEntry& e) {
      e.last_access = tick_;
      e.prefetched = false;
    });
    CacheEntry promoted = current;
    promoted.last_access = tick_;
    promoted.prefetched = false;
    for (std::size_t i = index_of(*found); i-- > 0;) {
      const Level upper = kCacheLevels[i];
      if (state(upper).entries.size() >= state(upper).capacity) evict_victim(upper);
      put(upper, promoted);
    }
    outcome = AccessOutcome::Hit;
  } else {
    ++stats_.misses;
    const Prime p = ensure_prime(d, Level::L1, 0);
    const CacheEntry fresh{d, p, tick_, false, table_.relationship_count(d)};
    for (std::size_t i = kNumCacheLevels; i-- > 0;) {
      const Level level = kCacheLevels[i];
      if (state(level).entries.size() >= state(level).capacity) evict_victim(level);
      put(level, fresh);
    }
    outcome = AccessOutcome::Miss;
  }
  table_.touch(d);
  prefetch(d);
  return outcome;
}

bool PfcsCache::try_prefetch(ElementId e, Prime prime) {
  const Level target = clamp_to_cache(table_.level_of(prime).value_or(Level::L3));
  const CacheEntry fresh{e, prime, tick_, true, table_.relationship_count(e)};
  bool inserted_any = false;
  for (std::size_t i = kNumCacheLevels; i-- > index_of(target);) {
    const Level level = kCacheLevels[i];
    LevelState& s = state(level);
    if (s.entries.size() >= s.capacity) {
      // Never displace an entry that is at least as valuable as the candidate.
      const auto& [degree, last, demand, key] = *s.order.begin();
      if (std::tie(degree, last) >= std::tie(fresh.rel_degree, fresh.last_access)) break;
      evict_victim(level);
    }
    put(level, fresh);
    inserted_any = true;
  }
  return inserted_any;
}

std::vector<ElementId> PfcsCache::prefetch(ElementId d) {
  std::vector<ElementId> fetched;
  const auto p = table_.prime_of(d);
  if (!p || config_.prefetch_cap == 0) return fetched;
  const StepBudget budget =
      table_.factorization_budget(table_.level_of(*p).value_or(Level::Memory));

  for (const BigInt& composite : registry_.related_composites(*p)) {
    if (fetched.size() >= config_.prefetch_cap) break;
    ++stats_.factorizations;
    Discovery found = registry_.discover(composite, budget);
    if (!found.complete) {
      ++stats_.budget_exhaustions;
      continue;
    }
    // Likelier-to-be-used members first; discovery order (ascending prime) breaks ties.
    std::vector<std::pair<double, ElementId>> candidates;
    for (ElementId e : found.elements) {
      if (e == d || contains(e)) continue;
      candidates.emplace_back(-table_.predicted_frequency(e, tick_), e);
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [score, e] : candidates) {
      if (fetched.size() >= config_.prefetch_cap) break;
      if (!try_prefetch(e, *table_.prime_of(e))) continue;
      fetched.push_back(e);
      ++stats_.prefetch_issued;
      if (observer_) observer_(d, e);
    }
  }
  return fetched;
}

void PfcsCache::relate(std::span<const ElementId> members) {
  if (members.size() < 2 || members.size() > config_.arity_cap) {
    ++rejected_groups_;
    return;
  }
  // A member may lose its prime to recycling triggered by a later member's
  // assignment; a second pass restores it.
  for (int pass = 0; pass < 2; ++pass) {
    for (ElementId d : members) ensure_prime(d, Level::L3, 1);
    if (std::all_of(members.begin(), members.end(),
                    [this](ElementId d) { return table_.prime_of(d).has_value(); })) {
      break;
    }
  }
  try {
    registry_.register_group(members, tick_);
  } catch (const std::invalid_argument&) {
    ++rejected_groups_;
    return;
  }
  for (ElementId d : members) refresh_degree(d);
}

std::optional<std::string> PfcsCache::check_invariants() const {
  if (stats_.hits + stats_.misses != stats_.accesses) return "pfcs: hits + misses != accesses";
  if (stats_.prefetch_used > stats_.prefetch_issued) return "pfcs: prefetch_used > prefetch_issued";
  for (std::size_t i = 0; i < kNumCacheLevels; ++i) {
    const LevelState& s = levels_[i];
    const std::string name(level_name(kCacheLevels[i]));
    if (s.entries.size() > s.capacity) return "pfcs: " + name + " exceeds capacity";
    if (s.order.size() != s.entries.size()) return "pfcs: " + name + " eviction order drifted";
    for (const auto& [d, e] : s.entries) {
      if (table_.prime_of(d) != e.prime) {
        return "pfcs: " + name + " entry " + std::to_string(key_of(d)) +
               " disagrees with the assignment table";
      }
      if (!s.order.contains(key_of_entry(e))) return "pfcs: " + name + " entry missing from order";
      if (i + 1 < kNumCacheLevels && !levels_[i + 1].entries.contains(d)) {
        return "pfcs: inclusion violated at " + name;
      }
    }
  }
  return std::nullopt;
}

}  // namespace pfcs
