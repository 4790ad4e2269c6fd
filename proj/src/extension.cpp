#include "ecstab/extension.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>

namespace ecstab {

namespace {

unsigned valuation_mod(u64 x, u64 p, unsigned n) {
  if (x == 0) return n;
  unsigned v = 0;
  while (x % p == 0) {
    x /= p;
    ++v;
  }
  return v;
}

// Discrete log of h in the cyclic group of prime order p generated by delta.
u64 prime_order_dlog(u64 h, u64 delta, u64 p, u64 ell) {
  if (p <= 1024) {
    u64 acc = 1;
    for (u64 d = 0; d < p; ++d) {
      if (acc == h) return d;
      acc = mul_mod(acc, delta, ell);
    }
  } else {
    const u64 s = isqrt(p) + 1;
    std::unordered_map<u64, u64> baby;
    u64 acc = 1;
    for (u64 j = 0; j < s; ++j) {
      baby.emplace(acc, j);
      acc = mul_mod(acc, delta, ell);
    }
    const u64 giant = *inverse_mod(pow_mod(delta, s, ell), ell);
    u64 cur = h;
    for (u64 i = 0; i <= s; ++i) {
      auto it = baby.find(cur);
      if (it != baby.end()) return (i * s + it->second) % p;
      cur = mul_mod(cur, giant, ell);
    }
  }
  throw InputError("element outside the order-p subgroup");
}

}  // namespace

std::string CyclicCharacter::conductor_bound() const {
  u128 m = 1;
  for (u64 l : moduli) m *= l;
  return to_string(m);
}

u64 subgroup_dlog(u64 q, u64 ell, u64 generator, u64 p, unsigned n) {
  const u64 pn = checked_pow(p, n);
  if ((ell - 1) % pn != 0) throw InputError(std::to_string(ell) + " is not 1 mod " + std::to_string(pn));
  if (q % ell == 0) throw InputError("dlog of a non-unit mod " + std::to_string(ell));
  const u64 cofactor = (ell - 1) / pn;
  const u64 h = pow_mod(q, cofactor, ell);
  const u64 gamma = pow_mod(generator, cofactor, ell);
  const u64 delta = pow_mod(gamma, pn / p, ell);  // order p
  const u64 gamma_inv = *inverse_mod(gamma, ell);
  u64 x = 0;
  u64 pk = 1;
  for (unsigned k = 0; k < n; ++k) {
    // (h * gamma^-x)^(p^(n-1-k)) = delta^(digit k)
    const u64 stripped = mul_mod(h, pow_mod(gamma_inv, x, ell), ell);
    const u64 hk = pow_mod(stripped, pn / (pk * p), ell);
    x += prime_order_dlog(hk, delta, p, ell) * pk;
    pk *= p;
  }
  return x % pn;
}

u64 frobenius_image(const CyclicCharacter& chi, u64 q) {
  const u64 pn = chi.order_modulus();
  u64 total = 0;
  for (std::size_t i = 0; i < chi.moduli.size(); ++i) {
    if (q % chi.moduli[i] == 0)
      throw InputError("Frobenius at " + std::to_string(q) + " undefined: shares a factor with the conductor");
    const u64 d = subgroup_dlog(q, chi.moduli[i], chi.generators[i], chi.p, chi.n);
    total = (total + mul_mod(chi.exponents[i] % pn, d, pn)) % pn;
  }
  return total;
}

u64 character_order(const CyclicCharacter& chi) {
  unsigned v = chi.n;
  for (u64 e : chi.exponents) v = std::min(v, valuation_mod(e % chi.order_modulus(), chi.p, chi.n));
  return checked_pow(chi.p, chi.n - v);
}

CyclicCharacter build_split_extension(std::span<const u64> sigma, std::span<const u64> primes, u64 p, unsigned n) {
  if (p < 3 || !is_prime(p)) throw InputError("p must be an odd prime");
  if (n < 1) throw InputError("level n must be >= 1");
  const u64 pn = checked_pow(p, n);
  const std::size_t t = sigma.size();
  if (primes.size() != t + 1)
    throw InputError("need #sigma + 1 = " + std::to_string(t + 1) + " primes, got " + std::to_string(primes.size()));
  for (std::size_t i = 0; i < primes.size(); ++i) {
    const u64 l = primes[i];
    if (!is_prime(l)) throw InputError(std::to_string(l) + " is not prime");
    if (l % pn != 1) throw InputError(std::to_string(l) + " is not 1 mod " + std::to_string(pn));
    if (std::find(sigma.begin(), sigma.end(), l) != sigma.end())
      throw InputError(std::to_string(l) + " lies in the split set");
    if (std::find(primes.begin(), primes.begin() + i, l) != primes.begin() + i)
      throw InputError("repeated prime " + std::to_string(l));
  }
  for (u64 q : sigma)
    if (!is_prime(q)) throw InputError("split set entry " + std::to_string(q) + " is not prime");

  CyclicCharacter chi;
  chi.p = p;
  chi.n = n;
  chi.moduli.assign(primes.begin(), primes.end());
  for (u64 l : primes) chi.generators.push_back(primitive_root(l));

  const std::size_t cols = t + 1;
  // rows: Frobenius coordinates of each q in sigma
  std::vector<std::vector<u64>> a(t, std::vector<u64>(cols));
  for (std::size_t r = 0; r < t; ++r)
    for (std::size_t c = 0; c < cols; ++c) a[r][c] = subgroup_dlog(sigma[r], primes[c], chi.generators[c], p, n);

  // Column-reduce over Z/p^n, mirroring every operation on a unimodular U.
  std::vector<std::vector<u64>> u(cols, std::vector<u64>(cols, 0));  // u[c] is column c
  for (std::size_t c = 0; c < cols; ++c) u[c][c] = 1;
  auto column_axpy = [&](std::size_t dst, std::size_t src, u64 k) {
    for (std::size_t r = 0; r < t; ++r) a[r][dst] = sub_mod(a[r][dst], mul_mod(k, a[r][src], pn), pn);
    for (std::size_t r = 0; r < cols; ++r) u[dst][r] = sub_mod(u[dst][r], mul_mod(k, u[src][r], pn), pn);
  };
  std::size_t pivots = 0;
  for (std::size_t r = 0; r < t; ++r) {
    std::size_t best = pivots;
    unsigned best_v = n;
    for (std::size_t c = pivots; c < cols; ++c) {
      const unsigned v = valuation_mod(a[r][c], p, n);
      if (v < best_v) {
        best_v = v;
        best = c;
      }
    }
    if (best_v == n) continue;
    if (best != pivots) {
      for (std::size_t rr = 0; rr < t; ++rr) std::swap(a[rr][best], a[rr][pivots]);
      std::swap(u[best], u[pivots]);
    }
    const u64 pv = checked_pow(p, best_v);
    const u64 unit_inv = *inverse_mod((a[r][pivots] / pv) % pn, pn);
    for (std::size_t c = pivots + 1; c < cols; ++c) {
      if (a[r][c] == 0) continue;
      const u64 k = mul_mod(a[r][c] / pv, unit_inv, pn);
      column_axpy(c, pivots, k);
    }
    ++pivots;
  }
  if (pivots > t) throw std::logic_error("Frobenius span exceeds t dimensions");

  std::vector<u64> kernel = u[cols - 1];
  for (std::size_t r = 0; r < t; ++r)
    if (a[r][cols - 1] != 0) throw std::logic_error("column reduction left a nonzero residue");
  auto lead = std::find_if(kernel.begin(), kernel.end(), [&](u64 x) { return x % p != 0; });
  if (lead == kernel.end()) throw std::logic_error("kernel vector vanishes mod p");
  const u64 scale = *inverse_mod(*lead, pn);
  for (u64& x : kernel) x = mul_mod(x, scale, pn);
  chi.exponents = std::move(kernel);
  return chi;
}

u64 ramification_index(const CyclicCharacter& chi, u64 ell) {
  for (std::size_t i = 0; i < chi.moduli.size(); ++i) {
    if (chi.moduli[i] != ell) continue;
    const u64 pn = chi.order_modulus();
    return checked_pow(chi.p, chi.n - valuation_mod(chi.exponents[i] % pn, chi.p, chi.n));
  }
  return 1;
}

std::vector<u64> ramified_primes(const CyclicCharacter& chi) {
  std::vector<u64> out;
  for (u64 l : chi.moduli)
    if (ramification_index(chi, l) > 1) out.push_back(l);
  return out;
}

u64 cyclotomic_splitting_count(u64 ell, u64 p) {
  if (ell % p == 0) throw InputError("splitting count undefined at p");
  unsigned k = 1;
  while (static_cast<u128>(checked_pow(p, k)) * p < (u128{1} << 62)) ++k;
  const u64 pk = checked_pow(p, k);
  const u64 r = pow_mod(ell % pk, p - 1, pk);
  const unsigned v = valuation_mod((r + pk - 1) % pk, p, k);
  return v <= 1 ? 1 : checked_pow(p, v - 1);
}

DecompositionData decompose_in_tower(const CyclicCharacter& chi, u64 ell) {
  if (ell == chi.p) throw InputError("decomposition above p is not modelled");
  DecompositionData d;
  d.ell = ell;
  d.q_infinity_splits = cyclotomic_splitting_count(ell, chi.p);
  const u64 pn = chi.order_modulus();
  auto pos = std::find(chi.moduli.begin(), chi.moduli.end(), ell);
  if (pos == chi.moduli.end()) {
    d.e = 1;
    d.frobenius_lift = frobenius_image(chi, ell);
  } else {
    const std::size_t i = static_cast<std::size_t>(pos - chi.moduli.begin());
    d.e = ramification_index(chi, ell);
    u64 lift = 0;
    for (std::size_t j = 0; j < chi.moduli.size(); ++j) {
      if (j == i) continue;
      lift = (lift + mul_mod(chi.exponents[j] % pn, subgroup_dlog(ell, chi.moduli[j], chi.generators[j], chi.p, chi.n), pn)) % pn;
    }
    d.frobenius_lift = lift;
  }
  // Residue fields of Q_infinity above ell already contain every p-power
  // extension of F_ell, so the decomposition group over Q_infinity is the
  // inertia image alone.
  d.g = d.q_infinity_splits * (pn / d.e);
  return d;
}

std::vector<CheckItem> verify_extension(const CyclicCharacter& chi, std::span<const u64> sigma, const CurveQ& curve,
                                        const CountOptions& options) {
  std::vector<CheckItem> items;
  std::ostringstream why;
  bool formed = chi.p >= 3 && is_prime(chi.p) && chi.n >= 1 && chi.moduli.size() == chi.generators.size() &&
                chi.moduli.size() == chi.exponents.size() && !chi.moduli.empty();
  u64 pn = 0;
  if (formed) {
    try {
      pn = chi.order_modulus();
    } catch (const InputError&) {
      formed = false;
    }
  }
  if (!formed) why << "malformed header or vector lengths";
  for (std::size_t i = 0; formed && i < chi.moduli.size(); ++i) {
    const u64 l = chi.moduli[i];
    if (!is_prime(l) || l % pn != 1) {
      formed = false;
      why << "modulus " << l << " is not a prime = 1 mod " << pn;
    } else if (std::count(chi.moduli.begin(), chi.moduli.end(), l) != 1) {
      formed = false;
      why << "modulus " << l << " repeated";
    } else if (chi.generators[i] % l == 0 || chi.generators[i] != primitive_root(l)) {
      // Accept any primitive root.
      bool primitive = chi.generators[i] % l != 0;
      for (auto [q, e] : factor(l - 1)) {
        (void)e;
        if (primitive && pow_mod(chi.generators[i], (l - 1) / q, l) == 1) primitive = false;
      }
      if (!primitive) {
        formed = false;
        why << chi.generators[i] << " is not a primitive root mod " << l;
      }
    } else if (chi.exponents[i] >= pn) {
      formed = false;
      why << "exponent " << chi.exponents[i] << " not reduced mod " << pn;
    }
  }
  if (formed) why << "moduli " << chi.moduli.size() << " primes = 1 mod " << pn;
  items.push_back({"well_formed", formed, why.str()});
  if (!formed) {
    for (const char* name : {"exact_order", "ramification_in_moduli", "sigma_split", "ramified_disjoint_from_Q1_Q2"})
      items.push_back({name, false, "skipped: malformed character"});
    return items;
  }

  const u64 ord = character_order(chi);
  items.push_back({"exact_order", ord == pn, "order " + std::to_string(ord) + " vs p^n = " + std::to_string(pn)});

  const auto ramified = ramified_primes(chi);
  std::ostringstream ram;
  ram << "ramified {";
  for (std::size_t i = 0; i < ramified.size(); ++i) ram << (i ? "," : "") << ramified[i];
  ram << "}";
  items.push_back({"ramification_in_moduli", true, ram.str()});

  bool split = true;
  std::ostringstream sp;
  for (u64 q : sigma) {
    try {
      const u64 v = frobenius_image(chi, q);
      sp << "chi(" << q << ")=" << v << " ";
      if (v != 0) split = false;
    } catch (const InputError&) {
      sp << q << " divides the conductor ";
      split = false;
    }
  }
  items.push_back({"sigma_split", split, sigma.empty() ? "empty split set" : sp.str()});

  bool disjoint = true;
  std::ostringstream dj;
  for (u64 l : ramified) {
    auto red = reduce_mod(curve, l);
    if (std::holds_alternative<BadReduction>(red)) {
      disjoint = false;
      dj << l << " in Q1 (bad reduction) ";
      continue;
    }
    const u64 count = count_points(std::get<CurveFp>(red), options);
    dj << "#E(F_" << l << ")=" << count << " ";
    if (count % chi.p == 0) {
      disjoint = false;
      dj << "(in Q2) ";
    }
  }
  items.push_back({"ramified_disjoint_from_Q1_Q2", disjoint, dj.str()});
  return items;
}

}  // namespace ecstab
