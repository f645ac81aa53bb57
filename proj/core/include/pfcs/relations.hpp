#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "pfcs/assignment.hpp"
#include "pfcs/factorizer.hpp"
#include "pfcs/types.hpp"

namespace pfcs {

inline constexpr std::size_t kDefaultArityCap = 16;

class ArityViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class UnassignedMember : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A registered relationship: distinct members and the product of their primes.
struct RelationGroup {
  std::vector<ElementId> members;  // ascending by prime
  std::vector<Prime> primes;       // members' primes, same order
  BigInt composite;
  std::uint64_t created_at = 0;  // caller's logical tick
  std::uint64_t sequence = 0;    // registration order, unique
};

struct Discovery {
  std::vector<ElementId> elements;  // ascending by prime
  std::vector<BigInt> dangling;     // prime factors with no live element
  bool complete = true;
};

// Relationship registry with a prime -> composites index.
//
// Single writer; discover and related_composites may run concurrently when no
// writer is active (discover mutates the factorizer's cache, so concurrent
// readers need their own Factorizer).
class RelationRegistry {
 public:
  RelationRegistry(AssignmentTable& table, Factorizer& factorizer,
                   std::size_t arity_cap = kDefaultArityCap);

  // Product of the members' primes. Idempotent for an identical member set.
  BigInt register_group(std::span<const ElementId> members, std::uint64_t now = 0);

  // Factorizes c and maps every prime factor back to its element.
  Discovery discover(const BigInt& c, StepBudget budget);

  // Registered composites divisible by p, most recently registered first.
  std::vector<BigInt> related_composites(Prime p) const;

  // Removes every group whose composite p divides; returns the removed composites.
  std::vector<BigInt> purge_prime(Prime p);

  // assign_prime followed by purging the composites of any recycled primes.
  Assignment assign(ElementId d, Level level, std::uint64_t now,
                    std::size_t expected_relationships = 0);

  const RelationGroup* find(const BigInt& composite) const;
  std::size_t group_count() const noexcept { return groups_.size(); }
  std::size_t arity_cap() const noexcept { return arity_cap_; }
  void for_each_group(const std::function<void(const RelationGroup&)>& fn) const;

  AssignmentTable& table() noexcept { return table_; }
  const AssignmentTable& table() const noexcept { return table_; }

  // Verifies index soundness/completeness and the squarefree product of every
  // group; returns the first violation.
  std::optional<std::string> audit() const;

 private:
  void unindex(const RelationGroup& group);

  AssignmentTable& table_;
  Factorizer& factorizer_;
  std::size_t arity_cap_;
  std::uint64_t next_sequence_ = 0;

  std::unordered_map<BigInt, RelationGroup, BigIntHash> groups_;
  // Postings keyed by registration sequence, newest first.
  std::unordered_map<Prime, std::map<std::uint64_t, BigInt, std::greater<>>> by_prime_;
};

}  // namespace pfcs
