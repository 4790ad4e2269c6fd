#pragma once

// Cyclic degree-p^n subfields of Q(mu_m) described by characters on
// (Z/mZ)^x, with m a product of primes l_i = 1 mod p^n.
//
// A character is fixed by one exponent e_i per prime: on the l_i component
// it sends a unit u to e_i * log(u) in Z/p^nZ, where log is the discrete log
// base the smallest primitive root g_i, reduced mod p^n.

#include <span>
#include <string>
#include <vector>

#include "ecstab/curve.hpp"

namespace ecstab {

struct CyclicCharacter {
  u64 p = 0;
  unsigned n = 0;
  std::vector<u64> moduli;
  std::vector<u64> generators;
  std::vector<u64> exponents;

  u64 order_modulus() const { return checked_pow(p, n); }
  /// Decimal product of the moduli (m may exceed 64 bits).
  std::string conductor_bound() const;

  friend bool operator==(const CyclicCharacter&, const CyclicCharacter&) = default;
};

/// Discrete log of q in the order-p^n quotient of (Z/lZ)^x: the k mod p^n
/// with q^((l-1)/p^n) = g^(k (l-1)/p^n). Pohlig-Hellman digit by digit.
u64 subgroup_dlog(u64 q, u64 ell, u64 generator, u64 p, unsigned n);

/// Value of the character on the Frobenius at q, i.e. on q mod m.
/// Throws InputError when q shares a factor with m.
u64 frobenius_image(const CyclicCharacter& chi, u64 q);

/// Order of the character: p^n / p^(min_i v_p(e_i)), or 1 if trivial.
u64 character_order(const CyclicCharacter& chi);

/// A character of exact order p^n on the given primes that is trivial on the
/// Frobenius of every prime in sigma. Needs #primes = #sigma + 1, primes
/// distinct, prime, = 1 mod p^n and disjoint from sigma.
CyclicCharacter build_split_extension(std::span<const u64> sigma, std::span<const u64> primes, u64 p, unsigned n);

/// Ramification index at ell: the order of e_i in Z/p^nZ (1 if ell is not a
/// modulus or e_i = 0).
u64 ramification_index(const CyclicCharacter& chi, u64 ell);

std::vector<u64> ramified_primes(const CyclicCharacter& chi);

/// Splitting of ell in L_infinity = L * Q_infinity over Q_infinity.
struct DecompositionData {
  u64 ell = 0;
  /// Ramification index of a prime of L_infinity over Q_infinity.
  u64 e = 1;
  /// Number of primes of L_infinity above ell.
  u64 g = 1;
  /// Number of primes of Q_infinity above ell: p^(v_p(ell^(p-1) - 1) - 1).
  u64 q_infinity_splits = 1;
  /// Character value on the Frobenius lift through the other components
  /// (moduli only; informational).
  u64 frobenius_lift = 0;
};

/// Number of primes of the cyclotomic Z_p-extension above ell (ell != p).
u64 cyclotomic_splitting_count(u64 ell, u64 p);

/// Throws InputError for ell = p or ell dividing m without being a modulus.
DecompositionData decompose_in_tower(const CyclicCharacter& chi, u64 ell);

struct CheckItem {
  std::string name;
  bool pass = false;
  std::string evidence;
};

/// Re-checks a character against a split set and a curve: structural
/// validity, exact order, splitting of sigma, and that no ramified prime is
/// of bad reduction or has p | #E(F_l). Idempotent; no item throws.
std::vector<CheckItem> verify_extension(const CyclicCharacter& chi, std::span<const u64> sigma, const CurveQ& curve,
                                        const CountOptions& options = {});

inline bool all_pass(const std::vector<CheckItem>& items) {
  for (const auto& i : items)
    if (!i.pass) return false;
  return true;
}

}  // namespace ecstab
