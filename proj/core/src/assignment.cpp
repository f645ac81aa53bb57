#include "pfcs/assignment.hpp"

#include <algorithm>
#include <cmath>

namespace pfcs {
namespace {

std::array<PrimePool, kNumLevels> make_pools(const AssignmentConfig& config) {
  for (std::size_t i = 0; i < kNumLevels; ++i) {
    for (std::size_t j = i + 1; j < kNumLevels; ++j) {
      if (config.ranges[i].overlaps(config.ranges[j])) {
        throw std::invalid_argument("AssignmentTable: prime ranges of " +
                                    std::string(level_name(kAllLevels[i])) + " and " +
                                    std::string(level_name(kAllLevels[j])) + " overlap");
      }
    }
  }
  return {PrimePool(Level::L1, config.ranges[0], config.segment_size),
          PrimePool(Level::L2, config.ranges[1], config.segment_size),
          PrimePool(Level::L3, config.ranges[2], config.segment_size),
          PrimePool(Level::Memory, config.ranges[3], config.segment_size)};
}

}  // namespace

double predict_frequency(const AccessStats& stats, std::uint64_t now, double alpha) noexcept {
  if (stats.ewma == 0.0) return 0.0;
  const std::uint64_t gap = now > stats.last_seen ? now - stats.last_seen : 0;
  return stats.ewma * std::pow(alpha, static_cast<double>(gap));
}

void record_access(AccessStats& stats, std::uint64_t now, double alpha) noexcept {
  stats.ewma = predict_frequency(stats, now, alpha) + 1.0;
  stats.last_seen = now;
}

Level select_range(double frequency, std::size_t relationships, StepBudget /*budget*/,
                   const RangeThresholds& thresholds) noexcept {
  if (frequency >= thresholds.hot) return Level::L1;
  if (frequency >= thresholds.warm) return Level::L2;
  return relationships > 0 ? Level::L3 : Level::Memory;
}

AssignmentTable::AssignmentTable(AssignmentConfig config)
    : config_(std::move(config)), pools_(make_pools(config_)) {
  if (!(config_.alpha > 0.0 && config_.alpha <= 1.0)) {
    throw std::invalid_argument("AssignmentTable: alpha must lie in (0, 1]");
  }
  if (!(config_.recycle_fraction > 0.0 && config_.recycle_fraction <= 1.0)) {
    throw std::invalid_argument("AssignmentTable: recycle fraction must lie in (0, 1]");
  }
}

Assignment AssignmentTable::assign_prime(ElementId d, Level level, std::uint64_t now,
                                         std::size_t expected_relationships) {
  if (auto it = data_to_prime_.find(d); it != data_to_prime_.end()) {
    return Assignment{it->second, *level_of(it->second), false, {}};
  }

  const double frequency = predicted_frequency(d, now);
  const std::size_t relationships = std::max(relationship_count(d), expected_relationships);
  const Level target =
      select_range(frequency, relationships, factorization_budget(level), config_.thresholds);
  PrimePool& target_pool = pool(target);

  Assignment result;
  result.level = target;
  result.fresh = true;

  std::optional<Prime> p = target_pool.allocate();
  if (!p) {
    const auto live = static_cast<double>(target_pool.allocated_count());
    const auto count = static_cast<std::size_t>(std::ceil(config_.recycle_fraction * live));
    for (Prime reclaimed : target_pool.recycle_lru(count)) {
      auto owner = prime_to_data_.find(reclaimed);
      if (owner == prime_to_data_.end()) continue;
      result.recycled.emplace_back(owner->second, reclaimed);
      data_to_prime_.erase(owner->second);
      prime_to_data_.erase(owner);
    }
    p = target_pool.allocate();
  }
  if (!p) {
    throw AssignmentFailure("assign_prime: pool " + std::string(level_name(target)) +
                            " exhausted after recycling");
  }

  data_to_prime_.emplace(d, *p);
  prime_to_data_.emplace(*p, d);
  result.prime = *p;
  return result;
}

void AssignmentTable::bind(ElementId d, Prime p) {
  if (data_to_prime_.contains(d)) {
    throw std::invalid_argument("AssignmentTable::bind: element already mapped");
  }
  const auto level = level_of(p);
  if (!level || !is_prime(p) || !pool(*level).claim(p)) {
    throw std::invalid_argument("AssignmentTable::bind: " + std::to_string(p) +
                                " is not a free pool prime");
  }
  data_to_prime_.emplace(d, p);
  prime_to_data_.emplace(p, d);
}

std::optional<Prime> AssignmentTable::release_element(ElementId d) {
  auto it = data_to_prime_.find(d);
  if (it == data_to_prime_.end()) return std::nullopt;
  const Prime p = it->second;
  data_to_prime_.erase(it);
  prime_to_data_.erase(p);
  pool(*level_of(p)).release(p);
  return p;
}

void AssignmentTable::record_access(ElementId d, std::uint64_t now) {
  pfcs::record_access(stats_[d], now, config_.alpha);
}

void AssignmentTable::touch(ElementId d) {
  auto it = data_to_prime_.find(d);
  if (it == data_to_prime_.end()) return;
  pool(*level_of(it->second)).touch(it->second);
}

std::optional<Prime> AssignmentTable::prime_of(ElementId d) const {
  auto it = data_to_prime_.find(d);
  if (it == data_to_prime_.end()) return std::nullopt;
  return it->second;
}

std::optional<ElementId> AssignmentTable::element_of(Prime p) const {
  auto it = prime_to_data_.find(p);
  if (it == prime_to_data_.end()) return std::nullopt;
  return it->second;
}

double AssignmentTable::predicted_frequency(ElementId d, std::uint64_t now) const {
  auto it = stats_.find(d);
  if (it == stats_.end()) return 0.0;
  return predict_frequency(it->second, now, config_.alpha);
}

std::size_t AssignmentTable::relationship_count(ElementId d) const {
  auto it = rel_count_.find(d);
  return it == rel_count_.end() ? 0 : it->second;
}

void AssignmentTable::add_relationship(ElementId d) { ++rel_count_[d]; }

void AssignmentTable::remove_relationship(ElementId d) {
  auto it = rel_count_.find(d);
  if (it == rel_count_.end()) return;
  if (--it->second == 0) rel_count_.erase(it);
}

std::optional<Level> AssignmentTable::level_of(Prime p) const noexcept {
  for (Level level : kAllLevels) {
    if (config_.ranges[index_of(level)].contains(p)) return level;
  }
  return std::nullopt;
}

std::optional<std::string> AssignmentTable::audit() const {
  if (data_to_prime_.size() != prime_to_data_.size()) {
    return "map sizes differ: " + std::to_string(data_to_prime_.size()) + " vs " +
           std::to_string(prime_to_data_.size());
  }
  for (const auto& [d, p] : data_to_prime_) {
    auto back = prime_to_data_.find(p);
    if (back == prime_to_data_.end() || back->second != d) {
      return "prime " + std::to_string(p) + " does not map back to element " +
             std::to_string(key_of(d));
    }
    const auto level = level_of(p);
    if (!level) return "prime " + std::to_string(p) + " lies outside every range";
    if (!pool(*level).is_allocated(p)) {
      return "prime " + std::to_string(p) + " is mapped but not allocated";
    }
  }
  std::size_t allocated = 0;
  for (const PrimePool& pool : pools_) allocated += pool.allocated_count();
  if (allocated != data_to_prime_.size()) {
    return "pools hold " + std::to_string(allocated) + " allocated primes for " +
           std::to_string(data_to_prime_.size()) + " mapped elements";
  }
  return std::nullopt;
}

}  // namespace pfcs
