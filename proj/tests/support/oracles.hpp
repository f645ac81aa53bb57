#pragma once

// Deliberately naive reference implementations. None of these share code with
// the library; tests compare the library against them.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <list>
#include <optional>
#include <vector>

namespace oracle {

inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

inline std::vector<std::uint64_t> primes_between(std::uint64_t lo, std::uint64_t hi) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t v = lo; v <= hi; ++v) {
    if (is_prime(v)) out.push_back(v);
  }
  return out;
}

// Ascending prime factors with multiplicity.
inline std::vector<std::uint64_t> factor(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    while (n % d == 0) {
      out.push_back(d);
      n /= d;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

// List-scan LRU; front is most recent.
class NaiveLru {
 public:
  explicit NaiveLru(std::size_t capacity) : capacity_(capacity) {}

  bool access(std::uint64_t key) {
    auto it = std::find(items_.begin(), items_.end(), key);
    const bool hit = it != items_.end();
    if (hit) items_.erase(it);
    else if (items_.size() == capacity_) items_.pop_back();
    items_.push_front(key);
    return hit;
  }
  const std::list<std::uint64_t>& items() const { return items_; }

 private:
  std::size_t capacity_;
  std::list<std::uint64_t> items_;
};

// Sum_{k=1..n} k^-theta.
inline double harmonic(std::uint64_t n, double theta) {
  double sum = 0.0;
  for (std::uint64_t k = n; k >= 1; --k) sum += std::pow(static_cast<double>(k), -theta);
  return sum;
}

}  // namespace oracle
