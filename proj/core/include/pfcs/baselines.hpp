#pragma once

#include <cstdint>
#include <list>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>

#include "pfcs/policy.hpp"

namespace pfcs {

inline constexpr double kDefaultLirsHirFraction = 0.01;

class LruPolicy final : public ReplacementPolicy {
 public:
  explicit LruPolicy(std::size_t capacity);

  std::string_view name() const override { return "lru"; }
  AccessOutcome access(ElementId d) override;
  SimStats stats() const override { return stats_; }
  bool contains(ElementId d) const override { return index_.contains(d); }
  std::size_t resident_count() const override { return index_.size(); }
  std::optional<std::string> check_invariants() const override;

 private:
  std::size_t capacity_;
  std::list<ElementId> order_;  // front = most recent
  std::unordered_map<ElementId, std::list<ElementId>::iterator> index_;
  SimStats stats_;
};

// Adaptive Replacement Cache (Megiddo & Modha): recency list T1, frequency
// list T2, their ghost lists B1/B2, and the adaptive target p for |T1|.
class ArcPolicy final : public ReplacementPolicy {
 public:
  explicit ArcPolicy(std::size_t capacity);

  std::string_view name() const override { return "arc"; }
  AccessOutcome access(ElementId d) override;
  SimStats stats() const override { return stats_; }
  bool contains(ElementId d) const override;
  std::size_t resident_count() const override { return lists_[kT1].size() + lists_[kT2].size(); }
  std::optional<std::string> check_invariants() const override;

  double target() const noexcept { return p_; }
  std::size_t t1_size() const noexcept { return lists_[kT1].size(); }
  std::size_t t2_size() const noexcept { return lists_[kT2].size(); }
  std::size_t b1_size() const noexcept { return lists_[kB1].size(); }
  std::size_t b2_size() const noexcept { return lists_[kB2].size(); }

 private:
  enum ListId : std::uint8_t { kT1 = 0, kT2 = 1, kB1 = 2, kB2 = 3 };
  struct Slot {
    ListId list;
    std::list<ElementId>::iterator it;
  };

  void move_to_front(ElementId d, ListId to);
  void drop_lru(ListId from);
  void replace(bool hit_in_b2);

  std::size_t capacity_;
  double p_ = 0.0;
  std::list<ElementId> lists_[4];  // front = MRU
  std::unordered_map<ElementId, Slot> index_;
  SimStats stats_;
};

// Low Inter-reference Recency Set (Jiang & Zhang): LIR blocks hold most of the
// cache; resident HIR blocks sit in queue Q; stack S orders recency and keeps
// an LIR block at its bottom.
class LirsPolicy final : public ReplacementPolicy {
 public:
  explicit LirsPolicy(std::size_t capacity, double hir_fraction = kDefaultLirsHirFraction);

  std::string_view name() const override { return "lirs"; }
  AccessOutcome access(ElementId d) override;
  SimStats stats() const override { return stats_; }
  bool contains(ElementId d) const override;
  std::size_t resident_count() const override { return lir_count_ + queue_.size(); }
  std::optional<std::string> check_invariants() const override;

  std::size_t lir_capacity() const noexcept { return lir_capacity_; }
  std::size_t hir_capacity() const noexcept { return hir_capacity_; }
  std::size_t lir_count() const noexcept { return lir_count_; }
  std::size_t stack_size() const noexcept { return stack_.size(); }

 private:
  struct Block {
    bool lir = false;
    bool resident = false;
    bool in_stack = false;
    bool in_queue = false;
    std::list<ElementId>::iterator stack_it;
    std::list<ElementId>::iterator queue_it;
  };

  void push_stack_top(ElementId d, Block& b);
  void remove_from_stack(Block& b);
  void push_queue_tail(ElementId d, Block& b);
  void remove_from_queue(Block& b);
  void demote_bottom_lir();
  void prune_stack();
  void forget_if_unused(ElementId d);

  std::size_t capacity_;
  std::size_t hir_capacity_;
  std::size_t lir_capacity_;
  std::size_t lir_count_ = 0;
  std::list<ElementId> stack_;  // front = top (most recent)
  std::list<ElementId> queue_;  // front = next HIR victim
  std::unordered_map<ElementId, Block> blocks_;
  SimStats stats_;
};

// "semantic" names the embedding-cache comparison slot; it has no implementation.
inline constexpr std::string_view kSemanticPolicyName = "semantic";

// lru / arc / lirs; nullptr for any other name.
std::unique_ptr<ReplacementPolicy> make_baseline(std::string_view name, std::size_t capacity,
                                                 double lirs_hir_fraction = kDefaultLirsHirFraction);

}  // namespace pfcs
