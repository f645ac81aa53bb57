#include "pfcs/primes.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "splitmix64.hpp"

namespace pfcs {
namespace {

__extension__ using u128 = unsigned __int128;

std::uint64_t isqrt_u64(std::uint64_t n) noexcept {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<long double>(n)));
  while (r > 0 && static_cast<u128>(r) * r > n) --r;
  while (static_cast<u128>(r + 1) * (r + 1) <= n) ++r;
  return r;
}

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) noexcept {
  return static_cast<std::uint64_t>(static_cast<u128>(a) * b % m);
}

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) noexcept {
  std::uint64_t result = 1 % m;
  base %= m;
  while (exp != 0) {
    if (exp & 1U) result = mul_mod(result, base, m);
    base = mul_mod(base, base, m);
    exp >>= 1U;
  }
  return result;
}

// Plain sieve of Eratosthenes up to `limit` inclusive.
std::vector<std::uint32_t> small_primes_upto(std::uint32_t limit) {
  std::vector<std::uint32_t> out;
  if (limit < 2) return out;
  std::vector<bool> composite(static_cast<std::size_t>(limit) + 1, false);
  for (std::uint64_t i = 2; i <= limit; ++i) {
    if (composite[i]) continue;
    out.push_back(static_cast<std::uint32_t>(i));
    for (std::uint64_t j = i * i; j <= limit; j += i) composite[j] = true;
  }
  return out;
}

// Base primes above this bound are not worth sieving; segments switch to
// per-candidate Miller-Rabin instead.
constexpr std::uint64_t kMaxBasePrime = std::uint64_t{1} << 22;

constexpr std::uint64_t kMillerRabinSeed = 0x5046435350524d31ULL;
constexpr int kBigMillerRabinRounds = 40;

}  // namespace

PrimeRange default_range(Level level) noexcept {
  switch (level) {
    case Level::L1: return PrimeRange::bounded(2, 997);
    case Level::L2: return PrimeRange::bounded(1009, 99991);
    case Level::L3: return PrimeRange::bounded(100003, 9999991);
    case Level::Memory: return PrimeRange::unbounded(10000019);
  }
  return {};
}

std::vector<Prime> sieve_primes(std::uint64_t lo, std::uint64_t hi, std::uint64_t max_span) {
  if (lo < 2 || lo > hi) {
    throw std::invalid_argument("sieve_primes: require 2 <= lo <= hi");
  }
  if (hi - lo > max_span) {
    throw SegmentTooLarge("sieve_primes: span " + std::to_string(hi - lo) +
                          " exceeds segment cap " + std::to_string(max_span));
  }

  std::vector<Prime> out;
  const std::uint64_t root = isqrt_u64(hi);
  if (root > kMaxBasePrime) {
    for (std::uint64_t n = lo;; ++n) {
      if (is_prime(n)) out.push_back(n);
      if (n == hi) break;
    }
    return out;
  }

  const auto width = static_cast<std::size_t>(hi - lo + 1);
  std::vector<std::uint8_t> composite(width, 0);
  for (std::uint32_t q : small_primes_upto(static_cast<std::uint32_t>(root))) {
    const std::uint64_t qq = static_cast<std::uint64_t>(q) * q;
    std::uint64_t start = std::max(qq, (lo + q - 1) / q * q);
    for (std::uint64_t m = start; m <= hi; m += q) {
      composite[m - lo] = 1;
      if (hi - m < q) break;  // next step would overflow past 2^64
    }
  }
  for (std::size_t i = 0; i < width; ++i) {
    if (composite[i] == 0) out.push_back(lo + i);
  }
  return out;
}

bool is_prime(std::uint64_t n) noexcept {
  if (n < 2) return false;
  static constexpr std::uint64_t kBases[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  for (std::uint64_t p : kBases) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1U) == 0) {
    d >>= 1U;
    ++s;
  }
  for (std::uint64_t a : kBases) {
    std::uint64_t x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mul_mod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

bool is_prime(const BigInt& n) {
  if (mpz_sgn(n.get_mpz_t()) <= 0) return false;
  if (fits_u64(n)) return is_prime(to_u64(n));
  if (mpz_even_p(n.get_mpz_t())) return false;

  const BigInt n_minus_1 = n - 1;
  BigInt d = n_minus_1;
  const mp_bitcnt_t s = mpz_scan1(d.get_mpz_t(), 0);
  mpz_fdiv_q_2exp(d.get_mpz_t(), d.get_mpz_t(), s);

  const BigInt span = n - 3;  // bases drawn from [2, n - 2]
  detail::SplitMix64 rng(kMillerRabinSeed);
  BigInt a;
  BigInt x;
  BigInt raw;
  for (int round = 0; round < kBigMillerRabinRounds; ++round) {
    // Two 64-bit draws give a base spread well beyond small values.
    raw = from_u64(rng.next());
    mpz_mul_2exp(raw.get_mpz_t(), raw.get_mpz_t(), 64);
    raw += from_u64(rng.next());
    mpz_mod(a.get_mpz_t(), raw.get_mpz_t(), span.get_mpz_t());
    a += 2;

    mpz_powm(x.get_mpz_t(), a.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
    if (x == 1 || x == n_minus_1) continue;
    bool composite = true;
    for (mp_bitcnt_t r = 1; r < s; ++r) {
      mpz_powm_ui(x.get_mpz_t(), x.get_mpz_t(), 2, n.get_mpz_t());
      if (x == n_minus_1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

PrimePool::PrimePool(Level level, PrimeRange range, std::uint64_t segment_size)
    : level_(level), range_(range), segment_size_(segment_size), cursor_(range.lo) {
  if (range_.lo < 2) throw std::invalid_argument("PrimePool: range must start at 2 or above");
  if (range_.hi && *range_.hi < range_.lo) {
    throw std::invalid_argument("PrimePool: empty range");
  }
  if (segment_size_ == 0) throw std::invalid_argument("PrimePool: segment size must be positive");
}

bool PrimePool::extend() {
  if (sieve_done_) return false;
  const std::uint64_t upper = range_.upper();
  const std::uint64_t seg_hi =
      (upper - cursor_ >= segment_size_ - 1) ? cursor_ + (segment_size_ - 1) : upper;
  for (Prime p : sieve_primes(cursor_, seg_hi, segment_size_)) free_.insert(p);
  if (seg_hi == upper) {
    sieve_done_ = true;
  } else {
    cursor_ = seg_hi + 1;
  }
  return true;
}

std::optional<Prime> PrimePool::allocate() {
  while (free_.empty()) {
    if (!extend()) return std::nullopt;
  }
  const Prime p = *free_.begin();
  free_.erase(free_.begin());
  const std::uint64_t ordinal = next_ordinal_++;
  allocated_.emplace(p, ordinal);
  by_age_.emplace(ordinal, p);
  return p;
}

std::vector<Prime> PrimePool::recycle_lru(std::size_t count) {
  std::vector<Prime> reclaimed;
  reclaimed.reserve(std::min(count, by_age_.size()));
  while (reclaimed.size() < count && !by_age_.empty()) {
    const auto [ordinal, p] = *by_age_.begin();
    by_age_.erase(by_age_.begin());
    allocated_.erase(p);
    free_.insert(p);
    reclaimed.push_back(p);
  }
  return reclaimed;
}

void PrimePool::touch(Prime p) {
  auto it = allocated_.find(p);
  if (it == allocated_.end()) {
    throw UnknownPrime("PrimePool::touch: " + std::to_string(p) + " is not allocated in " +
                       std::string(level_name(level_)));
  }
  by_age_.erase({it->second, p});
  it->second = next_ordinal_++;
  by_age_.emplace(it->second, p);
}

void PrimePool::release(Prime p) {
  auto it = allocated_.find(p);
  if (it == allocated_.end()) {
    throw UnknownPrime("PrimePool::release: " + std::to_string(p) + " is not allocated in " +
                       std::string(level_name(level_)));
  }
  by_age_.erase({it->second, p});
  allocated_.erase(it);
  free_.insert(p);
}

bool PrimePool::claim(Prime p) {
  if (!range_.contains(p) || allocated_.contains(p)) return false;
  while (!sieve_done_ && p >= cursor_) extend();
  auto it = free_.find(p);
  if (it == free_.end()) return false;
  free_.erase(it);
  const std::uint64_t ordinal = next_ordinal_++;
  allocated_.emplace(p, ordinal);
  by_age_.emplace(ordinal, p);
  return true;
}

std::optional<std::uint64_t> PrimePool::ordinal_of(Prime p) const {
  auto it = allocated_.find(p);
  if (it == allocated_.end()) return std::nullopt;
  return it->second;
}

}  // namespace pfcs
