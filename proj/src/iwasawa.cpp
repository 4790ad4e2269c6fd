#include "ecstab/iwasawa.hpp"

#include <algorithm>
#include <array>

namespace ecstab {

u64 kida_lambda(const KidaInput& in) {
  if (in.degree == 0) throw InputError("degree must be positive");
  auto sum = [&](const std::vector<u64>& es) {
    u64 s = 0;
    for (u64 e : es) {
      if (e == 0 || in.degree % e != 0)
        throw InputError("ramification index " + std::to_string(e) + " does not divide " + std::to_string(in.degree));
      s += e - 1;
    }
    return s;
  };
  return in.degree * in.lambda_base + sum(in.p1_e) + 2 * sum(in.p2_e);
}

KidaAssembly kida_input_from_extension(const CurveQ& curve, const CurveArithRecord* record, const CyclicCharacter& chi,
                                       u64 lambda_base, const CountOptions& options) {
  KidaAssembly out;
  out.input.degree = chi.order_modulus();
  out.input.lambda_base = lambda_base;
  for (u64 ell : ramified_primes(chi)) {
    KidaContribution c;
    c.ell = ell;
    c.decomposition = decompose_in_tower(chi, ell);
    const ReductionType t = record ? record->reduction_at(ell) : reduction_type(curve, ell);
    const auto copies = c.decomposition.g;
    switch (t) {
      case ReductionType::good: {
        const u64 n = count_points(std::get<CurveFp>(reduce_mod(curve, ell)), options);
        if (n % chi.p == 0) {
          c.kind = "P2";
          out.input.p2_e.insert(out.input.p2_e.end(), copies, c.decomposition.e);
        } else {
          c.kind = "none";
        }
        break;
      }
      case ReductionType::multiplicative_split:
        c.kind = "P1";
        out.input.p1_e.insert(out.input.p1_e.end(), copies, c.decomposition.e);
        break;
      case ReductionType::multiplicative_nonsplit:
        c.kind = "none";
        break;
      case ReductionType::additive:
      case ReductionType::unsupported:
        c.kind = "gap";
        out.gaps.push_back("ramified prime " + std::to_string(ell) + " has " + std::string(to_string(t)) + " reduction");
        break;
    }
    out.contributions.push_back(c);
  }
  return out;
}

u64 euler_characteristic_valuation(const EulerComponents& c) {
  if (c.regulator < 0) throw InputError("regulator valuation is normalized to be nonnegative");
  u64 v = static_cast<u64>(c.regulator) + c.sha;
  for (u64 t : c.tamagawa) v += t;
  for (u64 t : c.reduced_torsion) v += 2 * t;
  return v;
}

EulerResult euler_characteristic_valuation(const CurveArithRecord& record, u64 p,
                                           std::span<const u64> reduced_torsion_orders) {
  EulerResult r;
  if (!record.rank) r.assumptions.push_back("rank 0 assumed");
  if (auto reg = record.regulator_val(p)) {
    r.components.regulator = *reg;
  } else {
    r.assumptions.push_back("regulator unit at p assumed");
  }
  if (auto s = record.sha_valuation(p)) {
    r.components.sha = *s;
  } else {
    r.assumptions.push_back("Sha[p^infty] = 0 assumed");
  }
  for (u64 ell : record.bad_primes()) {
    if (ell == p) continue;
    if (auto c = record.tamagawa_at(ell))
      r.components.tamagawa.push_back(static_cast<u64>(valuation(static_cast<u128>(*c), p)));
    else
      r.assumptions.push_back("c_" + std::to_string(ell) + " prime to p assumed");
  }
  for (u64 n : reduced_torsion_orders) {
    if (n == 0) throw InputError("reduced torsion orders are positive");
    r.components.reduced_torsion.push_back(static_cast<u64>(valuation(static_cast<u128>(n), p)));
  }
  r.valuation = euler_characteristic_valuation(r.components);
  return r;
}

namespace {

using Mat = std::array<u64, 4>;

Mat mat_mul(const Mat& x, const Mat& y, u64 m) {
  return {add_mod(mul_mod(x[0], y[0], m), mul_mod(x[1], y[2], m), m),
          add_mod(mul_mod(x[0], y[1], m), mul_mod(x[1], y[3], m), m),
          add_mod(mul_mod(x[2], y[0], m), mul_mod(x[3], y[2], m), m),
          add_mod(mul_mod(x[2], y[1], m), mul_mod(x[3], y[3], m), m)};
}

Mat mat_pow(Mat base, u64 e, u64 m) {
  Mat r{1 % m, 0, 0, 1 % m};
  while (e) {
    if (e & 1) r = mat_mul(r, base, m);
    base = mat_mul(base, base, m);
    e >>= 1;
  }
  return r;
}

}  // namespace

u64 reduced_torsion_valuation(i64 a_p, u64 p, unsigned j, unsigned precision) {
  if (p < 2 || !is_prime(p)) throw InputError("p must be prime");
  {
    unsigned fits = 0;
    for (u128 pk = p; pk < (u128{1} << 62); pk *= p) ++fits;
    precision = std::max(1u, std::min(precision, fits));
  }
  const u64 m = checked_pow(p, precision);
  // [s_k, s_{k-1}] = M^(k-1) [s_1, s_0], M = [[a, -p], [1, 0]]
  const u64 a = reduce(a_p, m);
  Mat step{a, sub_mod(0, p % m, m), 1, 0};
  Mat acc{1, 0, 0, 1};
  // k - 1 = p^j - 1 = sum over i < j of (p - 1) p^i
  Mat pw = step;
  for (unsigned i = 0; i < j; ++i) {
    acc = mat_mul(acc, mat_pow(pw, p - 1, m), m);
    pw = mat_pow(pw, p, m);
  }
  const u64 sk = add_mod(mul_mod(acc[0], a, m), mul_mod(acc[1], 2 % m, m), m);
  // #E~(F_{p^k}) = p^k + 1 - s_k, and p^k = 0 mod p^precision once k >= precision
  const bool vanishes = j > 0 && (p >= precision || j >= precision || checked_pow(p, j) >= precision);
  const u64 pk_mod = vanishes ? 0 : pow_mod(p % m, checked_pow(p, j), m);
  const u64 count = sub_mod(add_mod(pk_mod, 1 % m, m), sk, m);
  if (count == 0) return precision;
  return static_cast<u64>(valuation(static_cast<u128>(count), p));
}

bool mulambda_consistency(const IwasawaInvariants& inv, u64 rank, u64 chi_val) {
  return (inv.mu == 0 && inv.lambda == rank) == (chi_val == 0);
}

std::string_view to_string(BaseChange b) {
  switch (b) {
    case BaseChange::certified: return "certified";
    case BaseChange::no_conclusion: return "no_conclusion";
    case BaseChange::not_applicable: return "not_applicable";
  }
  return "no_conclusion";
}

BaseChange tamagawa_base_change_check(u64 c_val_q, bool ramified, ReductionType reduction, u64 p) {
  if (p < 5 || !is_prime(p)) return BaseChange::not_applicable;
  if (c_val_q != 0) return BaseChange::no_conclusion;
  if (ramified && reduction != ReductionType::good) return BaseChange::no_conclusion;
  return BaseChange::certified;
}

}  // namespace ecstab
