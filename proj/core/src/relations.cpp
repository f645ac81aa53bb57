#include "pfcs/relations.hpp"

#include <algorithm>
#include <numeric>
#include <utility>

namespace pfcs {

RelationRegistry::RelationRegistry(AssignmentTable& table, Factorizer& factorizer,
                                   std::size_t arity_cap)
    : table_(table), factorizer_(factorizer), arity_cap_(arity_cap) {
  if (arity_cap_ < 2) throw std::invalid_argument("RelationRegistry: arity cap must be >= 2");
}

BigInt RelationRegistry::register_group(std::span<const ElementId> members, std::uint64_t now) {
  if (members.size() < 2 || members.size() > arity_cap_) {
    throw ArityViolation("register_group: group of " + std::to_string(members.size()) +
                         " members outside [2, " + std::to_string(arity_cap_) + "]");
  }

  std::vector<std::pair<Prime, ElementId>> tagged;
  tagged.reserve(members.size());
  for (ElementId d : members) {
    const auto p = table_.prime_of(d);
    if (!p) {
      throw UnassignedMember("register_group: element " + std::to_string(key_of(d)) +
                             " has no prime");
    }
    tagged.emplace_back(*p, d);
  }
  std::sort(tagged.begin(), tagged.end());
  if (std::adjacent_find(tagged.begin(), tagged.end(), [](const auto& a, const auto& b) {
        return a.first == b.first;
      }) != tagged.end()) {
    throw ArityViolation("register_group: members must be distinct");
  }

  BigInt composite = 1;
  for (const auto& [p, d] : tagged) composite *= from_u64(p);
  if (groups_.contains(composite)) return composite;

  RelationGroup group;
  group.composite = composite;
  group.created_at = now;
  group.sequence = next_sequence_++;
  for (const auto& [p, d] : tagged) {
    group.primes.push_back(p);
    group.members.push_back(d);
    by_prime_[p].emplace(group.sequence, composite);
    table_.add_relationship(d);
  }
  groups_.emplace(composite, std::move(group));
  return composite;
}

Discovery RelationRegistry::discover(const BigInt& c, StepBudget budget) {
  const Factorization f = factorizer_.factorize(c, budget);
  Discovery out;
  out.complete = f.complete;
  const BigInt* previous = nullptr;
  for (const BigInt& factor : f.factors) {
    if (previous != nullptr && *previous == factor) continue;  // prime powers name one element
    previous = &factor;
    std::optional<ElementId> owner;
    if (fits_u64(factor)) owner = table_.element_of(to_u64(factor));
    if (owner) {
      out.elements.push_back(*owner);
    } else {
      out.dangling.push_back(factor);
    }
  }
  return out;
}

std::vector<BigInt> RelationRegistry::related_composites(Prime p) const {
  std::vector<BigInt> out;
  auto it = by_prime_.find(p);
  if (it == by_prime_.end()) return out;
  out.reserve(it->second.size());
  for (const auto& [sequence, composite] : it->second) out.push_back(composite);
  return out;
}

void RelationRegistry::unindex(const RelationGroup& group) {
  for (std::size_t i = 0; i < group.primes.size(); ++i) {
    auto it = by_prime_.find(group.primes[i]);
    if (it != by_prime_.end()) {
      it->second.erase(group.sequence);
      if (it->second.empty()) by_prime_.erase(it);
    }
    table_.remove_relationship(group.members[i]);
  }
}

std::vector<BigInt> RelationRegistry::purge_prime(Prime p) {
  std::vector<BigInt> removed = related_composites(p);
  for (const BigInt& composite : removed) {
    auto it = groups_.find(composite);
    if (it == groups_.end()) continue;
    unindex(it->second);
    groups_.erase(it);
  }
  return removed;
}

Assignment RelationRegistry::assign(ElementId d, Level level, std::uint64_t now,
                                    std::size_t expected_relationships) {
  Assignment result = table_.assign_prime(d, level, now, expected_relationships);
  for (const auto& [element, prime] : result.recycled) purge_prime(prime);
  return result;
}

const RelationGroup* RelationRegistry::find(const BigInt& composite) const {
  auto it = groups_.find(composite);
  return it == groups_.end() ? nullptr : &it->second;
}

void RelationRegistry::for_each_group(const std::function<void(const RelationGroup&)>& fn) const {
  for (const auto& [composite, group] : groups_) fn(group);
}

std::optional<std::string> RelationRegistry::audit() const {
  std::size_t postings = 0;
  for (const auto& [p, list] : by_prime_) {
    for (const auto& [sequence, composite] : list) {
      ++postings;
      const RelationGroup* group = find(composite);
      if (group == nullptr) {
        return "posting under " + std::to_string(p) + " references unregistered composite " +
               composite.get_str();
      }
      if (group->sequence != sequence ||
          std::find(group->primes.begin(), group->primes.end(), p) == group->primes.end()) {
        return "posting under " + std::to_string(p) + " does not match group " +
               composite.get_str();
      }
    }
  }
  std::size_t expected_postings = 0;
  for (const auto& [composite, group] : groups_) {
    expected_postings += group.primes.size();
    BigInt product = 1;
    for (std::size_t i = 0; i < group.primes.size(); ++i) {
      const Prime p = group.primes[i];
      if (i > 0 && group.primes[i - 1] >= p) {
        return "group " + composite.get_str() + " is not squarefree or not sorted";
      }
      product *= from_u64(p);
      if (table_.prime_of(group.members[i]) != p) {
        return "group " + composite.get_str() + " member " +
               std::to_string(key_of(group.members[i])) + " no longer owns prime " +
               std::to_string(p);
      }
      auto it = by_prime_.find(p);
      if (it == by_prime_.end() || !it->second.contains(group.sequence)) {
        return "group " + composite.get_str() + " missing posting under " + std::to_string(p);
      }
    }
    if (product != composite) return "group " + composite.get_str() + " product mismatch";
  }
  if (postings != expected_postings) return "stray postings in index";
  return std::nullopt;
}

}  // namespace pfcs
