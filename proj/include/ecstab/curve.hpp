#pragma once

// Short Weierstrass curves y^2 = x^3 + a x + b over Q and their reductions.

#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "ecstab/arith.hpp"

namespace ecstab {

/// Integral model y^2 = x^3 + a x + b with nonzero discriminant.
///
/// Coefficients are limited to |a| < 2^21 and |b| < 2^31 so that the height
/// fits in 64 bits and the discriminant in 128 bits.
class CurveQ {
 public:
  static constexpr i64 kMaxA = (i64{1} << 21) - 1;
  static constexpr i64 kMaxB = (i64{1} << 31) - 1;

  /// Throws InputError for singular models or out-of-range coefficients.
  static CurveQ make(i64 a, i64 b);

  i64 a() const { return a_; }
  i64 b() const { return b_; }
  /// -16 (4a^3 + 27b^2)
  i128 discriminant() const { return delta_; }
  u64 height() const { return height_; }
  bool minimal() const { return minimal_; }

  std::string to_string() const;

  friend bool operator==(const CurveQ& x, const CurveQ& y) { return x.a_ == y.a_ && x.b_ == y.b_; }

 private:
  CurveQ(i64 a, i64 b);
  i64 a_;
  i64 b_;
  i128 delta_;
  u64 height_;
  bool minimal_;
};

/// max(|a|^3, b^2).
u64 height(i64 a, i64 b);

/// True iff no prime q has q^12 | gcd(a^3, b^2), with gcd(0, m) = |m|.
bool is_minimal(i64 a, i64 b);

inline i128 discriminant(i64 a, i64 b) {
  return -16 * (4 * static_cast<i128>(a) * a * a + 27 * static_cast<i128>(b) * b);
}

/// Nonsingular reduction of a curve modulo a prime ell (ell >= 3).
struct CurveFp {
  u64 ell;
  u64 a;
  u64 b;

  /// Throws InputError if ell is not prime or the reduction is singular.
  static CurveFp make(u64 ell, u64 a, u64 b);
};

struct BadReduction {
  u64 ell;
};

/// The reduction at ell when ell does not divide the discriminant.
std::variant<CurveFp, BadReduction> reduce_mod(const CurveQ& curve, u64 ell);

enum class ReductionType { good, multiplicative_split, multiplicative_nonsplit, additive, unsupported };

std::string_view to_string(ReductionType t);
std::optional<ReductionType> parse_reduction_type(std::string_view s);
inline bool is_multiplicative(ReductionType t) {
  return t == ReductionType::multiplicative_split || t == ReductionType::multiplicative_nonsplit;
}

/// Kodaira-free classification from the short model. Primes 2 and 3 dividing
/// the discriminant are tagged unsupported, as is any prime at which the
/// model is not minimal (l^4 | a and l^6 | b).
ReductionType reduction_type(const CurveQ& curve, u64 ell);

struct CountOptions {
  /// Exhaustive counting below this prime, baby-step giant-step at or above.
  u64 exhaustive_threshold = 10000;
};

/// #E(F_ell) including the point at infinity.
u64 count_points(const CurveFp& curve, const CountOptions& options = {});

/// a_ell = ell + 1 - #E(F_ell).
i64 frobenius_trace(const CurveFp& curve, const CountOptions& options = {});

struct OrdinaryCheck {
  bool ordinary = false;
  std::string reason;  // "ordinary", "bad_reduction", "supersingular"
  std::optional<i64> trace;
};

/// Good ordinary reduction at the odd prime p: p does not divide the
/// discriminant or a_p.
OrdinaryCheck is_good_ordinary(const CurveQ& curve, u64 p, const CountOptions& options = {});

struct IrreducibilityWitness {
  u64 ell;
  i64 trace;
  /// a_ell^2 - 4 ell reduced mod p; a quadratic non-residue.
  u64 discriminant_mod_p;
};

/// Least prime ell <= search_bound, ell not dividing p * Delta, whose
/// Frobenius polynomial x^2 - a_ell x + ell has no root mod p. Such an ell
/// proves E[p] irreducible; absence of one proves nothing.
std::optional<IrreducibilityWitness> irreducibility_certificate(const CurveQ& curve, u64 p, u64 search_bound,
                                                                const CountOptions& options = {});

}  // namespace ecstab
