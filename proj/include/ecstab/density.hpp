#pragma once

// Closed-form densities, counts and bounds, and the sweeps that test them.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ecstab/cache.hpp"
#include "ecstab/curve.hpp"

namespace ecstab {

struct Rational {
  u128 num = 0;
  u128 den = 1;

  static Rational make(u128 num, u128 den);
  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string to_string() const;
  friend bool operator==(const Rational&, const Rational&) = default;
};

Rational operator-(const Rational& x, const Rational& y);

struct DensityValue {
  Rational value;
  /// (p^2 - p - 1) / (p^(n-1) (p^2 - 1) (p - 1)), checked equal to value.
  Rational alternate;
  /// p < 5: surjectivity of the mod-p image is not guaranteed.
  bool small_p_warning = false;
};

/// Density of S_n: (p^2 - p - 1) / (p^(n-1) (p + 1) (p - 1)^2).
DensityValue theoretical_s_density(u64 p, unsigned n);
/// Density of T_n: the rest of the class 1 mod p^n, p / (p^(n-1) (p^2 - 1) (p - 1)).
Rational theoretical_t_density(u64 p, unsigned n);

struct SweepPoint {
  u64 x = 0;
  u64 hits = 0;
  u64 total = 0;
  double ratio = 0;
  double reference = 0;
  double rel_error = 0;
};

struct SweepResult {
  std::string param;
  std::vector<SweepPoint> series;
  /// No qualifying candidates at the smallest checkpoint.
  bool empty = false;
  /// Population sweeps at 2 and 3: the short model is never minimal there.
  bool model_limited = false;
  std::vector<std::string> notes;

  const SweepPoint& last() const { return series.back(); }
};

enum class SweepMode { S, T, PEc };

struct SweepOptions {
  CountOptions count;
  SweepCache* cache = nullptr;
  unsigned threads = 1;
};

/// Counts qualifying primes <= x against pi(x) at each checkpoint.
/// S/T: primes of S_n / T_n; reference is the closed-form density.
/// PEc: good primes p' >= 5 with p' | #E~(F_p'); reference is
/// x (log log x)^2 / (log x)^2 divided by pi(x).
SweepResult empirical_density_sweep(const CurveQ& curve, u64 p, unsigned n, const std::vector<u64>& checkpoints,
                                    SweepMode mode, const SweepOptions& options = {});

/// {M in SL2(F_p) : tr M != 2} by brute force over all p^4 matrices, and
/// the closed form p^3 - p^2 - p.
std::pair<u64, u64> sl2_trace_count(u64 p);

struct TpCount {
  u64 character_sum = 0;
  u64 enumeration = 0;
  std::vector<std::pair<u64, u64>> members;
  bool agree() const { return character_sum == enumeration; }
};

/// Pairs (a, b) in F_p^2 with 4a^3 + 27b^2 != 0 and #E_{a,b}(F_p) in {p, p+1}.
TpCount count_tp(u64 p);
/// (a, b) in the set implies (c^4 a, c^6 b) in it for every c != 0.
bool tp_twist_closed(u64 p, const std::vector<std::pair<u64, u64>>& members);

struct BoundCheck {
  bool pass = false;
  u64 count = 0;
  double bound = 0;
  /// Smallest c1 that makes the check pass.
  double min_c1 = 0;
  /// p < 16: log log p is below 1 and the raw formula is weak.
  bool small_p = false;
};

/// count_tp(p) <= c1 p^(3/2) log p (log log p)^2.
BoundCheck lenstra_bound_check(u64 p, double c1);

struct SeriesValue {
  double value = 0;
  /// Rigorous bound on |value - exact|.
  double error_bound = 0;
  u64 terms = 0;
};

/// 1/2 (1 - prod_{i >= 1} (1 - p^-(2i-1))).
SeriesValue delaunay_proportion(u64 p, double tol);

/// zeta(s) - 1, partial sum plus the integral-test bracket midpoint.
SeriesValue zeta_tail(double s, double tol);

struct LowerBound {
  double value = 0;
  double one_sixth = 0;
  double inv_p = 0;
  double delaunay = 0;
  double zeta_p_tail = 0;
  double sqrt_term = 0;
  double error_bound = 0;
};

/// 1/6 - 1/p - delaunay(p) - (zeta(p) - 1) - zeta(10) c1 log p (log log p)^2 / sqrt p.
LowerBound lower_bound_density(u64 p, double c1);

/// Minimal nonsingular models (a, b) with height < x at each checkpoint;
/// hits are those with ell not dividing the discriminant, reference 1 - 1/ell.
SweepResult population_sweep(u64 ell, const std::vector<u64>& height_checkpoints);

}  // namespace ecstab
