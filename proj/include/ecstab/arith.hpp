#pragma once

// Elementary number theory over machine integers: modular arithmetic,
// primality, factorization and prime sieving.

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ecstab {

using i64 = std::int64_t;
using u64 = std::uint64_t;
using i128 = __int128;
using u128 = unsigned __int128;

/// Raised for malformed or out-of-domain inputs (non-prime moduli, singular
/// models, bad flags). Callers at the CLI boundary turn it into usage errors.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline u64 mul_mod(u64 a, u64 b, u64 m) {
  return static_cast<u64>(static_cast<u128>(a) * b % m);
}

inline u64 add_mod(u64 a, u64 b, u64 m) {
  u64 s = a + b;
  return (s >= m || s < a) ? s - m : s;
}

inline u64 sub_mod(u64 a, u64 b, u64 m) { return a >= b ? a - b : a + (m - b); }

/// Least nonnegative residue of a signed value.
inline u64 reduce(i128 a, u64 m) {
  i128 r = a % static_cast<i128>(m);
  if (r < 0) r += m;
  return static_cast<u64>(r);
}

u64 pow_mod(u64 base, u64 exp, u64 m);
std::optional<u64> inverse_mod(u64 a, u64 m);

u64 gcd(u64 a, u64 b);
u128 gcd(u128 a, u128 b);
u64 lcm(u64 a, u64 b);

/// floor(sqrt(n)), exact.
u64 isqrt(u64 n);

/// Deterministic Miller-Rabin, valid for all 64-bit inputs.
bool is_prime(u64 n);
bool is_prime(u128 n);

/// Legendre symbol (a/p) for an odd prime p; returns -1, 0 or 1.
int legendre(u64 a, u64 p);

/// A square root of a modulo the odd prime p, when a is a square.
std::optional<u64> sqrt_mod(u64 a, u64 p);

/// p-adic valuation of a nonzero value.
int valuation(u128 n, u64 p);
int valuation(i128 n, u64 p);

/// Prime factorization with multiplicities, primes ascending.
std::vector<std::pair<u64, int>> factor(u64 n);
std::vector<std::pair<u128, int>> factor(u128 n);

/// Distinct prime divisors of a nonzero signed value.
std::vector<u64> prime_divisors(i128 n);

/// Smallest primitive root modulo the prime p.
u64 primitive_root(u64 p);

/// p^k, throwing InputError on 64-bit overflow.
u64 checked_pow(u64 p, unsigned k);

/// Calls fn(l) for every prime l in [lo, hi] in increasing order
/// (segmented Eratosthenes).
void for_each_prime(u64 lo, u64 hi, const std::function<void(u64)>& fn);
std::vector<u64> primes_in(u64 lo, u64 hi);
u64 prime_pi(u64 x);

std::string to_string(i128 v);
std::string to_string(u128 v);

}  // namespace ecstab
