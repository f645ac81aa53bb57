#include "pfcs/factorizer.hpp"

#include <algorithm>
#include <mutex>
#include <numeric>
#include <utility>

#include "pfcs/primes.hpp"
#include "splitmix64.hpp"

namespace pfcs {
namespace {

__extension__ using u128 = unsigned __int128;

constexpr std::uint64_t kRhoBatch = 64;

// Montgomery arithmetic modulo an odd 64-bit n. Residues stay in Montgomery
// form throughout; gcds with n are unaffected by the R factor.
class MontgomeryArith {
 public:
  using Value = std::uint64_t;

  explicit MontgomeryArith(std::uint64_t n) : n_(n) {
    std::uint64_t inv = n;
    for (int i = 0; i < 5; ++i) inv *= 2 - n * inv;
    n_inv_ = inv;
  }

  Value constant(std::uint64_t raw) const { return raw % n_; }
  Value start(std::uint64_t raw) const { return raw % n_; }
  Value one() const { return 1 % n_; }

  void step(Value& y, Value c) const { y = add(mul(y, y), c); }
  void accumulate(Value& q, Value x, Value y) const { q = mul(q, x > y ? x - y : y - x); }
  BigInt gcd(Value q) const { return from_u64(std::gcd(q, n_)); }
  BigInt gcd_diff(Value x, Value y) const { return from_u64(std::gcd(x > y ? x - y : y - x, n_)); }

 private:
  Value mul(Value a, Value b) const {
    const u128 t = static_cast<u128>(a) * b;
    const auto m = static_cast<std::uint64_t>(t) * n_inv_;
    const auto t_hi = static_cast<std::uint64_t>(t >> 64);
    const auto mn_hi = static_cast<std::uint64_t>((static_cast<u128>(m) * n_) >> 64);
    return t_hi >= mn_hi ? t_hi - mn_hi : t_hi + (n_ - mn_hi);
  }
  Value add(Value a, Value b) const {
    const Value s = a + b;
    return (s < a || s >= n_) ? s - n_ : s;
  }

  std::uint64_t n_;
  std::uint64_t n_inv_;
};

// Same interface over GMP integers for n >= 2^64.
class MpzArith {
 public:
  using Value = BigInt;

  explicit MpzArith(const BigInt& n) : n_(n) {}

  Value constant(std::uint64_t raw) const { return from_u64(raw); }
  Value start(std::uint64_t raw) const { return from_u64(raw) % n_; }
  Value one() const { return BigInt(1); }

  void step(Value& y, const Value& c) {
    mpz_mul(tmp_.get_mpz_t(), y.get_mpz_t(), y.get_mpz_t());
    mpz_add(tmp_.get_mpz_t(), tmp_.get_mpz_t(), c.get_mpz_t());
    mpz_mod(y.get_mpz_t(), tmp_.get_mpz_t(), n_.get_mpz_t());
  }
  void accumulate(Value& q, const Value& x, const Value& y) {
    mpz_sub(diff_.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t());
    mpz_abs(diff_.get_mpz_t(), diff_.get_mpz_t());
    mpz_mul(tmp_.get_mpz_t(), q.get_mpz_t(), diff_.get_mpz_t());
    mpz_mod(q.get_mpz_t(), tmp_.get_mpz_t(), n_.get_mpz_t());
  }
  BigInt gcd(const Value& q) const {
    BigInt g;
    mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), n_.get_mpz_t());
    return g;
  }
  BigInt gcd_diff(const Value& x, const Value& y) {
    mpz_sub(diff_.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t());
    return gcd(diff_);
  }

 private:
  BigInt n_;
  BigInt tmp_;
  BigInt diff_;
};

template <class Arith>
RhoResult brent_rho(Arith& ar, const BigInt& n, std::uint64_t budget, std::uint64_t seed) {
  using Value = typename Arith::Value;
  detail::SplitMix64 rng(seed);
  RhoResult result;
  std::uint64_t& steps = result.steps;

  while (steps < budget) {
    // Small polynomial constants; 0 and -2 are avoided by construction.
    const Value c = ar.constant(rng.next() % 0xfffffffbULL + 1);
    Value y = ar.start(rng.next());
    Value q = ar.one();
    Value x = y;
    Value ys = y;
    BigInt g = 1;
    bool exhausted = false;

    for (std::uint64_t r = 1; g == 1 && !exhausted; r *= 2) {
      x = y;
      for (std::uint64_t i = 0; i < r; ++i) {
        if (steps == budget) {
          exhausted = true;
          break;
        }
        ar.step(y, c);
        ++steps;
      }
      for (std::uint64_t k = 0; k < r && g == 1 && !exhausted; k += kRhoBatch) {
        ys = y;
        const std::uint64_t batch = std::min(kRhoBatch, r - k);
        for (std::uint64_t i = 0; i < batch; ++i) {
          if (steps == budget) {
            exhausted = true;
            break;
          }
          ar.step(y, c);
          ar.accumulate(q, x, y);
          ++steps;
        }
        g = ar.gcd(q);
      }
    }

    if (g == 1) return result;  // budget spent without a collision
    if (g == n) {
      // The batch overshot; replay it one gcd at a time.
      g = 1;
      while (g == 1) {
        if (steps == budget) return result;
        ar.step(ys, c);
        ++steps;
        g = ar.gcd_diff(x, ys);
      }
    }
    if (g != n) {
      result.factor = std::move(g);
      return result;
    }
    // Degenerate cycle: retry with the next constant.
  }
  return result;
}

// n = root^exponent with the smallest exponent > 1, if n is a perfect power.
std::optional<std::pair<BigInt, unsigned long>> perfect_power(const BigInt& n) {
  if (mpz_perfect_power_p(n.get_mpz_t()) == 0) return std::nullopt;
  const std::size_t bits = mpz_sizeinbase(n.get_mpz_t(), 2);
  BigInt root;
  for (unsigned long k = 2; k <= bits; ++k) {
    if (mpz_root(root.get_mpz_t(), n.get_mpz_t(), k) != 0) return std::pair{root, k};
  }
  return std::nullopt;
}

enum class Source { Table, Cache, Computed };

void append_table_factors(const SpfTable& spf, std::uint32_t n, unsigned long multiplicity,
                          std::vector<BigInt>& out) {
  for (std::uint32_t p : spf.factor(n)) {
    for (unsigned long i = 0; i < multiplicity; ++i) out.push_back(from_u64(p));
  }
}

const std::vector<std::uint32_t>& trial_primes() {
  static const std::vector<std::uint32_t> primes = [] {
    std::vector<std::uint32_t> out;
    for (Prime p : sieve_primes(2, kTrialDivisionBound)) out.push_back(static_cast<std::uint32_t>(p));
    return out;
  }();
  return primes;
}

Factorization compute(const BigInt& c, StepBudget budget, const SpfTable& spf,
                      std::uint64_t seed) {
  Factorization out;
  std::uint64_t steps = 0;
  const std::uint64_t max_steps = budget.max_steps;
  const std::uint64_t trial_cap = max_steps / kTrialShareDen * kTrialShareNum +
                                  max_steps % kTrialShareDen * kTrialShareNum / kTrialShareDen;

  // Stage 1: trial division by primes <= min(1000, floor(sqrt(c))).
  BigInt remaining = c;
  BigInt root;
  mpz_sqrt(root.get_mpz_t(), c.get_mpz_t());
  const std::uint64_t trial_limit =
      fits_u64(root) ? std::min<std::uint64_t>(kTrialDivisionBound, to_u64(root))
                     : kTrialDivisionBound;
  bool stop = false;
  for (std::uint32_t p : trial_primes()) {
    if (p > trial_limit) break;
    while (true) {
      if (steps >= trial_cap) {
        stop = true;
        break;
      }
      ++steps;
      if (mpz_divisible_ui_p(remaining.get_mpz_t(), p) == 0) break;
      out.factors.push_back(from_u64(p));
      mpz_divexact_ui(remaining.get_mpz_t(), remaining.get_mpz_t(), p);
    }
    if (stop || remaining == 1) break;
  }

  // Stage 2: resolve what is left. Table lookups, primality checks, and
  // perfect-power splits cost no steps; rho iterations and the parity split do.
  std::vector<std::pair<BigInt, unsigned long>> work;
  std::vector<std::pair<BigInt, unsigned long>> unresolved;
  if (remaining != 1) work.emplace_back(std::move(remaining), 1);
  while (!work.empty()) {
    auto [n, multiplicity] = std::move(work.back());
    work.pop_back();
    if (n == 1) continue;
    if (fits_u64(n) && spf.contains(to_u64(n))) {
      append_table_factors(spf, static_cast<std::uint32_t>(to_u64(n)), multiplicity, out.factors);
      continue;
    }
    if (is_prime(n)) {
      for (unsigned long i = 0; i < multiplicity; ++i) out.factors.push_back(n);
      continue;
    }
    if (auto power = perfect_power(n)) {
      work.emplace_back(std::move(power->first), multiplicity * power->second);
      continue;
    }
    if (steps >= max_steps) {
      unresolved.emplace_back(std::move(n), multiplicity);
      continue;
    }
    if (mpz_even_p(n.get_mpz_t()) != 0) {
      ++steps;
      work.emplace_back(n / 2, multiplicity);
      work.emplace_back(BigInt(2), multiplicity);
      continue;
    }
    RhoResult rho = pollard_rho(n, StepBudget{max_steps - steps}, seed);
    steps += rho.steps;
    if (rho.factor) {
      BigInt cofactor = n / *rho.factor;
      work.emplace_back(std::move(cofactor), multiplicity);
      work.emplace_back(std::move(*rho.factor), multiplicity);
    } else {
      unresolved.emplace_back(std::move(n), multiplicity);
    }
  }

  for (const auto& [n, multiplicity] : unresolved) {
    BigInt power;
    mpz_pow_ui(power.get_mpz_t(), n.get_mpz_t(), multiplicity);
    out.remainder *= power;
  }
  std::sort(out.factors.begin(), out.factors.end());
  out.complete = out.remainder == 1;
  out.steps = steps;
  return out;
}

Factorization factorize_impl(const BigInt& c, StepBudget budget, FactorizationCache& cache,
                             const SpfTable& spf, std::uint64_t seed, Source& source) {
  if (c < 2) throw InvalidComposite("factorize: composite must be >= 2");
  if (fits_u64(c) && spf.contains(to_u64(c))) {
    source = Source::Table;
    Factorization out;
    append_table_factors(spf, static_cast<std::uint32_t>(to_u64(c)), 1, out.factors);
    return out;
  }
  if (const Factorization* cached = cache.lookup(c, budget)) {
    source = Source::Cache;
    return *cached;
  }
  source = Source::Computed;
  Factorization out = compute(c, budget, spf, seed);
  cache.put(c, out, budget);
  return out;
}

}  // namespace

BigInt Factorization::product() const {
  BigInt acc = 1;
  for (const BigInt& f : factors) acc *= f;
  return acc;
}

SpfTable::SpfTable(std::uint32_t bound) : bound_(bound), spf_(static_cast<std::size_t>(bound) + 1, 0) {
  // Linear sieve: each composite is written exactly once, by its smallest prime.
  std::vector<std::uint32_t> primes;
  for (std::uint32_t i = 2; i <= bound_; ++i) {
    if (spf_[i] == 0) {
      spf_[i] = i;
      primes.push_back(i);
    }
    for (std::uint32_t p : primes) {
      const std::uint64_t m = static_cast<std::uint64_t>(p) * i;
      if (p > spf_[i] || m > bound_) break;
      spf_[m] = p;
    }
  }
}

std::shared_ptr<const SpfTable> SpfTable::shared() {
  static const std::shared_ptr<const SpfTable> table = std::make_shared<const SpfTable>();
  return table;
}

std::vector<std::uint32_t> SpfTable::factor(std::uint32_t n) const {
  std::vector<std::uint32_t> out;
  while (n > 1) {
    const std::uint32_t p = spf_[n];
    out.push_back(p);
    n /= p;
  }
  return out;
}

SpfTable build_spf_table() { return SpfTable(kSpfBound); }

RhoResult pollard_rho(const BigInt& n, StepBudget budget, std::uint64_t seed) {
  if (n < 4 || budget.max_steps == 0) return {};
  if (mpz_even_p(n.get_mpz_t()) != 0) return {BigInt(2), 1};
  if (fits_u64(n)) {
    MontgomeryArith ar(to_u64(n));
    return brent_rho(ar, n, budget.max_steps, seed);
  }
  MpzArith ar(n);
  return brent_rho(ar, n, budget.max_steps, seed);
}

FactorizationCache::FactorizationCache(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw std::invalid_argument("FactorizationCache: capacity must be positive");
}

std::optional<Factorization> FactorizationCache::get(const BigInt& c) {
  auto it = index_.find(c);
  if (it == index_.end()) return std::nullopt;
  order_.splice(order_.begin(), order_, it->second);
  return it->second->value;
}

const Factorization* FactorizationCache::lookup(const BigInt& c, StepBudget budget) {
  auto it = index_.find(c);
  if (it == index_.end()) return nullptr;
  const Entry& entry = *it->second;
  if (!entry.value.complete && entry.budget < budget.max_steps) return nullptr;
  order_.splice(order_.begin(), order_, it->second);
  return &it->second->value;
}

void FactorizationCache::put(const BigInt& c, Factorization f, StepBudget budget) {
  if (auto it = index_.find(c); it != index_.end()) {
    it->second->value = std::move(f);
    it->second->budget = budget.max_steps;
    order_.splice(order_.begin(), order_, it->second);
    return;
  }
  order_.push_front(Entry{c, std::move(f), budget.max_steps});
  index_.emplace(c, order_.begin());
  if (index_.size() > capacity_) {
    index_.erase(order_.back().key);
    order_.pop_back();
  }
}

Factorization factorize(const BigInt& c, StepBudget budget, FactorizationCache& cache,
                        const SpfTable& spf, std::uint64_t seed) {
  Source source{};
  return factorize_impl(c, budget, cache, spf, seed, source);
}

Factorizer::Factorizer(std::shared_ptr<const SpfTable> spf, std::size_t cache_capacity,
                       std::uint64_t seed)
    : spf_(std::move(spf)), cache_(cache_capacity), seed_(seed) {
  if (!spf_) throw std::invalid_argument("Factorizer: null SPF table");
}

Factorization Factorizer::factorize(const BigInt& c, StepBudget budget) {
  Source source{};
  Factorization out = factorize_impl(c, budget, cache_, *spf_, seed_, source);
  ++stats_.calls;
  switch (source) {
    case Source::Table: ++stats_.table_lookups; break;
    case Source::Cache: ++stats_.cache_hits; break;
    case Source::Computed: ++stats_.computed; break;
  }
  if (!out.complete) ++stats_.incomplete;
  return out;
}

}  // namespace pfcs
