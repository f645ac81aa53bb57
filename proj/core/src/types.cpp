#include "pfcs/types.hpp"

#include <climits>

namespace pfcs {

static_assert(sizeof(unsigned long) == sizeof(std::uint64_t),
              "mpz ui conversions assume a 64-bit unsigned long");

std::optional<Level> parse_level(std::string_view name) noexcept {
  for (Level level : kAllLevels) {
    if (level_name(level) == name) return level;
  }
  return std::nullopt;
}

std::size_t BigIntHash::operator()(const BigInt& value) const noexcept {
  const mpz_srcptr z = value.get_mpz_t();
  std::size_t h = static_cast<std::size_t>(mpz_sgn(z)) * 0x9e3779b97f4a7c15ULL;
  const std::size_t limbs = mpz_size(z);
  for (std::size_t i = 0; i < limbs; ++i) {
    h ^= static_cast<std::size_t>(mpz_getlimbn(z, static_cast<mp_size_t>(i))) + 0x9e3779b97f4a7c15ULL +
         (h << 6) + (h >> 2);
  }
  return h;
}

bool fits_u64(const BigInt& value) noexcept {
  return mpz_sgn(value.get_mpz_t()) >= 0 && mpz_fits_ulong_p(value.get_mpz_t()) != 0;
}

std::uint64_t to_u64(const BigInt& value) noexcept { return mpz_get_ui(value.get_mpz_t()); }

BigInt from_u64(std::uint64_t value) {
  BigInt out;
  mpz_set_ui(out.get_mpz_t(), static_cast<unsigned long>(value));
  return out;
}

}  // namespace pfcs
