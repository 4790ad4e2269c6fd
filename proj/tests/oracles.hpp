#pragma once

// Slow, obviously-correct reference computations used only by tests.

#include <cstdint>
#include <vector>

#include "ecstab/arith.hpp"

namespace oracle {

using ecstab::i64;
using ecstab::u64;

inline u64 md(i64 v, u64 m) {
  i64 r = v % static_cast<i64>(m);
  return static_cast<u64>(r < 0 ? r + static_cast<i64>(m) : r);
}

/// Affine solutions of y^2 = x^3 + a x + b over F_l plus infinity, by
/// trying every (x, y).
inline u64 brute_count(u64 l, i64 a, i64 b) {
  const u64 A = md(a, l), B = md(b, l);
  u64 n = 1;
  for (u64 x = 0; x < l; ++x) {
    const u64 rhs = (x * x % l * x + A * x + B) % l;
    for (u64 y = 0; y < l; ++y)
      if (y * y % l == rhs) ++n;
  }
  return n;
}

/// Euler's criterion, no shortcuts.
inline int euler_chi(u64 v, u64 l) {
  v %= l;
  if (v == 0) return 0;
  u64 r = 1, base = v, e = (l - 1) / 2;
  while (e) {
    if (e & 1) r = r * base % l;
    base = base * base % l;
    e >>= 1;
  }
  return r == 1 ? 1 : -1;
}

inline u64 char_sum_count(u64 l, i64 a, i64 b) {
  const u64 A = md(a, l), B = md(b, l);
  i64 s = 0;
  for (u64 x = 0; x < l; ++x) s += euler_chi((x * x % l * x + A * x + B) % l, l);
  return static_cast<u64>(static_cast<i64>(l) + 1 + s);
}

/// Projective points of a singular cubic: l (split node), l + 2 (non-split
/// node), l + 1 (cusp).
inline u64 singular_projective_count(u64 l, i64 a, i64 b) { return brute_count(l, a, b); }

inline u64 full_dlog(u64 q, u64 l, u64 g) {
  u64 acc = 1;
  for (u64 k = 0; k < l - 1; ++k) {
    if (acc == q % l) return k;
    acc = acc * g % l;
  }
  return UINT64_MAX;
}

inline u64 smallest_primitive_root(u64 l) {
  for (u64 g = 2; g < l; ++g) {
    u64 acc = 1, order = 0;
    do {
      acc = acc * g % l;
      ++order;
    } while (acc != 1);
    if (order == l - 1) return g;
  }
  return 1;
}

inline u64 power_mod(u64 b, u64 e, u64 m) {
  u64 r = 1 % m;
  b %= m;
  while (e) {
    if (e & 1) r = static_cast<u64>(static_cast<unsigned __int128>(r) * b % m);
    b = static_cast<u64>(static_cast<unsigned __int128>(b) * b % m);
    e >>= 1;
  }
  return r;
}

inline bool is_prime_trial(u64 n) {
  if (n < 2) return false;
  for (u64 d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

}  // namespace oracle
