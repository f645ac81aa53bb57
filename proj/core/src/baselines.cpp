#include "pfcs/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pfcs {

SimStats& SimStats::operator+=(const SimStats& other) noexcept {
  accesses += other.accesses;
  hits += other.hits;
  misses += other.misses;
  prefetch_issued += other.prefetch_issued;
  prefetch_used += other.prefetch_used;
  evictions += other.evictions;
  factorizations += other.factorizations;
  budget_exhaustions += other.budget_exhaustions;
  return *this;
}

// ---------------------------------------------------------------- LRU

LruPolicy::LruPolicy(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw std::invalid_argument("LruPolicy: capacity must be >= 1");
}

AccessOutcome LruPolicy::access(ElementId d) {
  ++stats_.accesses;
  if (auto it = index_.find(d); it != index_.end()) {
    order_.splice(order_.begin(), order_, it->second);
    ++stats_.hits;
    return AccessOutcome::Hit;
  }
  ++stats_.misses;
  if (index_.size() == capacity_) {
    index_.erase(order_.back());
    order_.pop_back();
    ++stats_.evictions;
  }
  order_.push_front(d);
  index_.emplace(d, order_.begin());
  return AccessOutcome::Miss;
}

std::optional<std::string> LruPolicy::check_invariants() const {
  if (order_.size() > capacity_) return "lru: recency list exceeds capacity";
  if (order_.size() != index_.size()) return "lru: index and list disagree";
  return std::nullopt;
}

// ---------------------------------------------------------------- ARC

ArcPolicy::ArcPolicy(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw std::invalid_argument("ArcPolicy: capacity must be >= 1");
}

bool ArcPolicy::contains(ElementId d) const {
  auto it = index_.find(d);
  return it != index_.end() && (it->second.list == kT1 || it->second.list == kT2);
}

void ArcPolicy::move_to_front(ElementId d, ListId to) {
  auto it = index_.find(d);
  if (it == index_.end()) {
    lists_[to].push_front(d);
    index_.emplace(d, Slot{to, lists_[to].begin()});
    return;
  }
  lists_[to].splice(lists_[to].begin(), lists_[it->second.list], it->second.it);
  it->second = Slot{to, lists_[to].begin()};
}

void ArcPolicy::drop_lru(ListId from) {
  const ElementId victim = lists_[from].back();
  lists_[from].pop_back();
  index_.erase(victim);
}

void ArcPolicy::replace(bool hit_in_b2) {
  const auto t1 = static_cast<double>(lists_[kT1].size());
  const bool from_t1 =
      !lists_[kT1].empty() && (t1 > p_ || (hit_in_b2 && t1 == p_) || lists_[kT2].empty());
  if (from_t1) {
    move_to_front(lists_[kT1].back(), kB1);
  } else if (!lists_[kT2].empty()) {
    move_to_front(lists_[kT2].back(), kB2);
  } else {
    return;
  }
  ++stats_.evictions;
}

AccessOutcome ArcPolicy::access(ElementId d) {
  ++stats_.accesses;
  const auto c = static_cast<double>(capacity_);
  auto it = index_.find(d);

  if (it != index_.end() && (it->second.list == kT1 || it->second.list == kT2)) {
    move_to_front(d, kT2);
    ++stats_.hits;
    return AccessOutcome::Hit;
  }
  ++stats_.misses;

  if (it != index_.end() && it->second.list == kB1) {
    const auto b1 = static_cast<double>(lists_[kB1].size());
    const auto b2 = static_cast<double>(lists_[kB2].size());
    p_ = std::min(c, p_ + (b1 >= b2 ? 1.0 : b2 / b1));
    replace(false);
    move_to_front(d, kT2);
    return AccessOutcome::Miss;
  }
  if (it != index_.end() && it->second.list == kB2) {
    const auto b1 = static_cast<double>(lists_[kB1].size());
    const auto b2 = static_cast<double>(lists_[kB2].size());
    p_ = std::max(0.0, p_ - (b2 >= b1 ? 1.0 : b1 / b2));
    replace(true);
    move_to_front(d, kT2);
    return AccessOutcome::Miss;
  }

  const std::size_t l1 = lists_[kT1].size() + lists_[kB1].size();
  const std::size_t total = l1 + lists_[kT2].size() + lists_[kB2].size();
  if (l1 == capacity_) {
    if (lists_[kT1].size() < capacity_) {
      drop_lru(kB1);
      replace(false);
    } else {
      drop_lru(kT1);
      ++stats_.evictions;
    }
  } else if (total >= capacity_) {
    if (total == 2 * capacity_) drop_lru(kB2);
    replace(false);
  }
  move_to_front(d, kT1);
  return AccessOutcome::Miss;
}

std::optional<std::string> ArcPolicy::check_invariants() const {
  const std::size_t t1 = lists_[kT1].size();
  const std::size_t t2 = lists_[kT2].size();
  const std::size_t b1 = lists_[kB1].size();
  const std::size_t b2 = lists_[kB2].size();
  if (t1 + t2 > capacity_) return "arc: |T1|+|T2| > c";
  if (t1 + b1 > capacity_) return "arc: |T1|+|B1| > c";
  if (t1 + t2 + b1 + b2 > 2 * capacity_) return "arc: directory exceeds 2c";
  if (t2 + b2 > 2 * capacity_) return "arc: |T2|+|B2| > 2c";
  if (p_ < 0.0 || p_ > static_cast<double>(capacity_)) return "arc: p outside [0, c]";
  if (index_.size() != t1 + t2 + b1 + b2) return "arc: index and lists disagree";
  return std::nullopt;
}

// ---------------------------------------------------------------- LIRS

LirsPolicy::LirsPolicy(std::size_t capacity, double hir_fraction) : capacity_(capacity) {
  if (capacity_ == 0) throw std::invalid_argument("LirsPolicy: capacity must be >= 1");
  if (!(hir_fraction > 0.0 && hir_fraction < 1.0)) {
    throw std::invalid_argument("LirsPolicy: HIR fraction must lie in (0, 1)");
  }
  hir_capacity_ =
      std::max<std::size_t>(1, static_cast<std::size_t>(hir_fraction * static_cast<double>(capacity_)));
  if (capacity_ >= 2) hir_capacity_ = std::min(hir_capacity_, capacity_ - 1);
  lir_capacity_ = capacity_ - std::min(hir_capacity_, capacity_);
}

bool LirsPolicy::contains(ElementId d) const {
  auto it = blocks_.find(d);
  return it != blocks_.end() && it->second.resident;
}

void LirsPolicy::push_stack_top(ElementId d, Block& b) {
  if (b.in_stack) stack_.erase(b.stack_it);
  stack_.push_front(d);
  b.stack_it = stack_.begin();
  b.in_stack = true;
}

void LirsPolicy::remove_from_stack(Block& b) {
  if (!b.in_stack) return;
  stack_.erase(b.stack_it);
  b.in_stack = false;
}

void LirsPolicy::push_queue_tail(ElementId d, Block& b) {
  if (b.in_queue) queue_.erase(b.queue_it);
  queue_.push_back(d);
  b.queue_it = std::prev(queue_.end());
  b.in_queue = true;
}

void LirsPolicy::remove_from_queue(Block& b) {
  if (!b.in_queue) return;
  queue_.erase(b.queue_it);
  b.in_queue = false;
}

void LirsPolicy::forget_if_unused(ElementId d) {
  auto it = blocks_.find(d);
  if (it != blocks_.end() && !it->second.resident && !it->second.in_stack) blocks_.erase(it);
}

void LirsPolicy::prune_stack() {
  while (!stack_.empty()) {
    const ElementId bottom = stack_.back();
    Block& b = blocks_.at(bottom);
    if (b.lir) break;
    remove_from_stack(b);
    forget_if_unused(bottom);
  }
}

void LirsPolicy::demote_bottom_lir() {
  const ElementId bottom = stack_.back();
  Block& b = blocks_.at(bottom);
  b.lir = false;
  --lir_count_;
  remove_from_stack(b);
  push_queue_tail(bottom, b);
  prune_stack();
}

AccessOutcome LirsPolicy::access(ElementId d) {
  ++stats_.accesses;
  Block& b = blocks_[d];

  if (b.resident) {
    ++stats_.hits;
    if (b.lir) {
      const bool was_bottom = stack_.back() == d;
      push_stack_top(d, b);
      if (was_bottom) prune_stack();
    } else if (b.in_stack && lir_capacity_ > 0) {
      remove_from_queue(b);
      push_stack_top(d, b);
      b.lir = true;
      ++lir_count_;
      demote_bottom_lir();
    } else {
      push_stack_top(d, b);
      push_queue_tail(d, b);
      if (lir_count_ == 0) prune_stack();
    }
    return AccessOutcome::Hit;
  }

  ++stats_.misses;
  if (lir_count_ < lir_capacity_) {
    b.lir = true;
    b.resident = true;
    ++lir_count_;
    push_stack_top(d, b);
    return AccessOutcome::Miss;
  }

  if (queue_.size() >= hir_capacity_) {
    const ElementId victim = queue_.front();
    Block& vb = blocks_.at(victim);
    remove_from_queue(vb);
    vb.resident = false;
    ++stats_.evictions;
    forget_if_unused(victim);
  }

  b.resident = true;
  if (b.in_stack && lir_capacity_ > 0) {
    push_stack_top(d, b);
    b.lir = true;
    ++lir_count_;
    demote_bottom_lir();
  } else {
    b.lir = false;
    push_stack_top(d, b);
    push_queue_tail(d, b);
    if (lir_count_ == 0) prune_stack();
  }
  return AccessOutcome::Miss;
}

std::optional<std::string> LirsPolicy::check_invariants() const {
  if (lir_count_ > lir_capacity_) return "lirs: LIR set exceeds its capacity";
  if (queue_.size() > hir_capacity_) return "lirs: resident HIR queue exceeds its capacity";
  if (lir_count_ + queue_.size() > capacity_) return "lirs: residents exceed capacity";
  if (!stack_.empty() && !blocks_.at(stack_.back()).lir) return "lirs: stack bottom is not LIR";
  std::size_t lir = 0;
  std::size_t resident_hir = 0;
  for (const auto& [id, b] : blocks_) {
    if (b.lir) {
      ++lir;
      if (!b.resident || !b.in_stack) return "lirs: LIR block not resident in stack";
      if (b.in_queue) return "lirs: LIR block in HIR queue";
    } else if (b.resident) {
      ++resident_hir;
      if (!b.in_queue) return "lirs: resident HIR block missing from queue";
    } else if (b.in_queue) {
      return "lirs: non-resident block in queue";
    }
  }
  if (lir != lir_count_) return "lirs: LIR count drifted";
  if (resident_hir != queue_.size()) return "lirs: queue size drifted";
  return std::nullopt;
}

std::unique_ptr<ReplacementPolicy> make_baseline(std::string_view name, std::size_t capacity,
                                                 double lirs_hir_fraction) {
  if (name == "lru") return std::make_unique<LruPolicy>(capacity);
  if (name == "arc") return std::make_unique<ArcPolicy>(capacity);
  if (name == "lirs") return std::make_unique<LirsPolicy>(capacity, lirs_hir_fraction);
  return nullptr;
}

}  // namespace pfcs
