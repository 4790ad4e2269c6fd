#include "ecstab/curve.hpp"

#include <algorithm>
#include <cstdlib>

namespace ecstab {

u64 height(i64 a, i64 b) {
  const u64 abs_a = static_cast<u64>(std::llabs(a));
  const u64 abs_b = static_cast<u64>(std::llabs(b));
  return std::max(abs_a * abs_a * abs_a, abs_b * abs_b);
}

bool is_minimal(i64 a, i64 b) {
  const u128 abs_a = static_cast<u128>(std::llabs(a));
  const u128 abs_b = static_cast<u128>(std::llabs(b));
  const u128 g = gcd(abs_a * abs_a * abs_a, abs_b * abs_b);
  if (g == 0) return false;
  // g < 2^126, so a twelfth-power divisor q^12 needs q < 2^11.
  for (u64 q = 2; q < 2048; ++q) {
    if (!is_prime(q)) continue;
    u128 q12 = 1;
    bool fits = true;
    for (int i = 0; i < 12; ++i) {
      q12 *= q;
      if (q12 > g) {
        fits = false;
        break;
      }
    }
    if (!fits) break;
    if (g % q12 == 0) return false;
  }
  return true;
}

CurveQ::CurveQ(i64 a, i64 b)
    : a_(a), b_(b), delta_(ecstab::discriminant(a, b)), height_(ecstab::height(a, b)), minimal_(is_minimal(a, b)) {}

CurveQ CurveQ::make(i64 a, i64 b) {
  if (std::llabs(a) > kMaxA || std::llabs(b) > kMaxB)
    throw InputError("coefficients out of range: need |a| < 2^21 and |b| < 2^31");
  if (ecstab::discriminant(a, b) == 0)
    throw InputError("singular model y^2 = x^3 + " + std::to_string(a) + "x + " + std::to_string(b));
  return CurveQ(a, b);
}

std::string CurveQ::to_string() const {
  return "y^2 = x^3 + " + std::to_string(a_) + "x + " + std::to_string(b_);
}

CurveFp CurveFp::make(u64 ell, u64 a, u64 b) {
  if (!is_prime(ell)) throw InputError(std::to_string(ell) + " is not prime");
  if (ell < 3) throw InputError("short Weierstrass models are singular in characteristic 2");
  a %= ell;
  b %= ell;
  const i128 d = 4 * static_cast<i128>(mul_mod(mul_mod(a, a, ell), a, ell)) + 27 * static_cast<i128>(mul_mod(b, b, ell));
  if (d % static_cast<i128>(ell) == 0) throw InputError("singular reduction modulo " + std::to_string(ell));
  return CurveFp{ell, a, b};
}

std::variant<CurveFp, BadReduction> reduce_mod(const CurveQ& curve, u64 ell) {
  if (!is_prime(ell)) throw InputError(std::to_string(ell) + " is not prime");
  if (curve.discriminant() % static_cast<i128>(ell) == 0) return BadReduction{ell};
  return CurveFp{ell, reduce(curve.a(), ell), reduce(curve.b(), ell)};
}

std::string_view to_string(ReductionType t) {
  switch (t) {
    case ReductionType::good: return "good";
    case ReductionType::multiplicative_split: return "multiplicative_split";
    case ReductionType::multiplicative_nonsplit: return "multiplicative_nonsplit";
    case ReductionType::additive: return "additive";
    case ReductionType::unsupported: return "unsupported";
  }
  return "unsupported";
}

std::optional<ReductionType> parse_reduction_type(std::string_view s) {
  for (auto t : {ReductionType::good, ReductionType::multiplicative_split, ReductionType::multiplicative_nonsplit,
                 ReductionType::additive, ReductionType::unsupported})
    if (to_string(t) == s) return t;
  return std::nullopt;
}

ReductionType reduction_type(const CurveQ& curve, u64 ell) {
  if (!is_prime(ell)) throw InputError(std::to_string(ell) + " is not prime");
  const i128 l = ell;
  if (curve.discriminant() % l != 0) return ReductionType::good;
  if (ell <= 3) return ReductionType::unsupported;
  const u64 a = reduce(curve.a(), ell);
  const u64 b = reduce(curve.b(), ell);
  if (a != 0) {
    // Node at x0 = -3b/(2a); tangent slopes are the square roots of 3 x0,
    // which lies in the square class of -2ab.
    const u64 w = reduce(-2 * static_cast<i128>(a) * b, ell);
    return legendre(w, ell) == 1 ? ReductionType::multiplicative_split : ReductionType::multiplicative_nonsplit;
  }
  // |b| < 2^31 caps l^6 | b at l <= 35.
  if (ell <= 37 && curve.a() % static_cast<i64>(checked_pow(ell, 4)) == 0 &&
      curve.b() % static_cast<i64>(checked_pow(ell, 6)) == 0)
    return ReductionType::unsupported;
  return ReductionType::additive;
}

i64 frobenius_trace(const CurveFp& curve, const CountOptions& options) {
  return static_cast<i64>(curve.ell) + 1 - static_cast<i64>(count_points(curve, options));
}

OrdinaryCheck is_good_ordinary(const CurveQ& curve, u64 p, const CountOptions& options) {
  if (p < 3 || !is_prime(p)) throw InputError("is_good_ordinary needs an odd prime, got " + std::to_string(p));
  auto red = reduce_mod(curve, p);
  if (std::holds_alternative<BadReduction>(red)) return {false, "bad_reduction", std::nullopt};
  const i64 t = frobenius_trace(std::get<CurveFp>(red), options);
  if (t % static_cast<i64>(p) == 0) return {false, "supersingular", t};
  return {true, "ordinary", t};
}

std::optional<IrreducibilityWitness> irreducibility_certificate(const CurveQ& curve, u64 p, u64 search_bound,
                                                                const CountOptions& options) {
  if (p < 3 || !is_prime(p)) return std::nullopt;
  std::optional<IrreducibilityWitness> found;
  for_each_prime(3, search_bound, [&](u64 ell) {
    if (found || ell == p) return;
    auto red = reduce_mod(curve, ell);
    if (std::holds_alternative<BadReduction>(red)) return;
    const i64 t = frobenius_trace(std::get<CurveFp>(red), options);
    const u64 disc = reduce(static_cast<i128>(t) * t - 4 * static_cast<i128>(ell), p);
    if (legendre(disc, p) == -1) found = IrreducibilityWitness{ell, t, disc};
  });
  return found;
}

}  // namespace ecstab
