#include "ecstab/density.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace ecstab {

Rational Rational::make(u128 num, u128 den) {
  if (den == 0) throw InputError("zero denominator");
  const u128 g = gcd(num, den);
  return g ? Rational{num / g, den / g} : Rational{0, 1};
}

std::string Rational::to_string() const { return ecstab::to_string(num) + "/" + ecstab::to_string(den); }

Rational operator-(const Rational& x, const Rational& y) {
  const u128 l = x.num * y.den;
  const u128 r = y.num * x.den;
  if (r > l) throw std::domain_error("negative rational");
  return Rational::make(l - r, x.den * y.den);
}

DensityValue theoretical_s_density(u64 p, unsigned n) {
  if (p < 3 || !is_prime(p)) throw InputError("p must be an odd prime");
  if (n < 1) throw InputError("n must be >= 1");
  const u128 P = p;
  const u128 pn1 = checked_pow(p, n - 1);
  const u128 num = P * P - P - 1;
  DensityValue d;
  d.value = Rational::make(num, pn1 * (P + 1) * (P - 1) * (P - 1));
  d.alternate = Rational::make(num, pn1 * (P * P - 1) * (P - 1));
  if (!(d.value == d.alternate)) throw std::logic_error("density forms disagree");
  d.small_p_warning = p < 5;
  return d;
}

Rational theoretical_t_density(u64 p, unsigned n) {
  if (p < 3 || !is_prime(p)) throw InputError("p must be an odd prime");
  const u128 P = p;
  const u128 pn1 = checked_pow(p, n - 1);
  return Rational::make(P, pn1 * (P * P - 1) * (P - 1));
}

SweepResult empirical_density_sweep(const CurveQ& curve, u64 p, unsigned n, const std::vector<u64>& checkpoints,
                                    SweepMode mode, const SweepOptions& options) {
  if (checkpoints.empty()) throw InputError("no checkpoints");
  std::vector<u64> xs = checkpoints;
  std::sort(xs.begin(), xs.end());
  SweepResult r;
  TraceRequest req;
  req.lo = 3;
  req.hi = xs.back();
  double density = 0;
  std::string tag;
  if (mode == SweepMode::PEc) {
    tag = "PEc";
  } else {
    req.modulus = checked_pow(p, n);
    req.residue = 1;
    tag = mode == SweepMode::S ? "S" : "T";
    density = mode == SweepMode::S ? theoretical_s_density(p, n).value.to_double() : theoretical_t_density(p, n).to_double();
    if (p < 5) r.notes.push_back("p < 5: mod-p image may not be surjective");
  }
  r.param = "a=" + std::to_string(curve.a()) + ";b=" + std::to_string(curve.b()) + ";p=" + std::to_string(p) +
            ";n=" + std::to_string(n) + ";mode=" + tag;
  const auto traces = options.cache ? options.cache->get_or_compute(curve, req, options.count, options.threads)
                                    : compute_traces(curve, req, options.count, options.threads);
  std::size_t idx = 0;
  u64 hits = 0;
  for (u64 x : xs) {
    for (; idx < traces.size() && traces[idx].ell <= x; ++idx) {
      const auto& e = traces[idx];
      const u64 count = static_cast<u64>(static_cast<i64>(e.ell) + 1 - e.a);
      bool hit = false;
      if (mode == SweepMode::PEc)
        hit = e.ell >= 5 && count % e.ell == 0;
      else
        hit = (count % p == 0) == (mode == SweepMode::T);
      if (hit) ++hits;
    }
    SweepPoint pt;
    pt.x = x;
    pt.hits = hits;
    pt.total = prime_pi(x);
    pt.ratio = pt.total ? static_cast<double>(hits) / static_cast<double>(pt.total) : 0.0;
    if (mode == SweepMode::PEc) {
      const double lx = std::log(static_cast<double>(x));
      const double llx = x > 15 ? std::log(lx) : 0.0;
      pt.reference = pt.total ? static_cast<double>(x) * llx * llx / (lx * lx) / static_cast<double>(pt.total) : 0.0;
    } else {
      pt.reference = density;
    }
    pt.rel_error = pt.reference > 0 ? std::fabs(pt.ratio - pt.reference) / pt.reference : 0.0;
    r.series.push_back(pt);
  }
  r.empty = r.series.front().hits == 0;
  return r;
}

std::pair<u64, u64> sl2_trace_count(u64 p) {
  if (p < 3 || !is_prime(p)) throw InputError("p must be an odd prime");
  u64 count = 0;
  for (u64 a = 0; a < p; ++a)
    for (u64 d = 0; d < p; ++d) {
      const u64 ad = a * d % p;
      const bool trace_two = (a + d) % p == 2 % p;
      for (u64 b = 0; b < p; ++b)
        for (u64 c = 0; c < p; ++c)
          if ((ad + p - b * c % p) % p == 1 && !trace_two) ++count;
    }
  return {count, p * p * p - p * p - p};
}

TpCount count_tp(u64 p) {
  if (p < 5 || !is_prime(p)) throw InputError("count_tp needs a prime p >= 5");
  TpCount t;
  std::vector<int> chi(p, -1);
  chi[0] = 0;
  for (u64 y = 1; y < p; ++y) chi[y * y % p] = 1;
  std::vector<u64> cube(p);
  for (u64 x = 0; x < p; ++x) cube[x] = x * x % p * x % p;
  for (u64 a = 0; a < p; ++a)
    for (u64 b = 0; b < p; ++b) {
      if ((4 * cube[a] + 27 * (b * b % p)) % p == 0) continue;
      i64 s = 0;
      for (u64 x = 0; x < p; ++x) s += chi[(cube[x] + a * x + b) % p];
      const i64 n_sum = static_cast<i64>(p) + 1 + s;
      u64 n_enum = 1;
      for (u64 x = 0; x < p; ++x) {
        const u64 rhs = (cube[x] + a * x + b) % p;
        for (u64 y = 0; y < p; ++y)
          if (y * y % p == rhs) ++n_enum;
      }
      auto in_set = [&](u64 n) { return n == p || n == p + 1; };
      if (in_set(static_cast<u64>(n_sum))) {
        ++t.character_sum;
        t.members.emplace_back(a, b);
      }
      if (in_set(n_enum)) ++t.enumeration;
    }
  return t;
}

bool tp_twist_closed(u64 p, const std::vector<std::pair<u64, u64>>& members) {
  std::set<std::pair<u64, u64>> s(members.begin(), members.end());
  for (auto [a, b] : members)
    for (u64 c = 1; c < p; ++c) {
      const u64 c2 = c * c % p;
      const u64 c4 = c2 * c2 % p;
      const u64 c6 = c4 * c2 % p;
      if (!s.count({c4 * a % p, c6 * b % p})) return false;
    }
  return true;
}

BoundCheck lenstra_bound_check(u64 p, double c1) {
  BoundCheck r;
  r.count = count_tp(p).character_sum;
  const double lp = std::log(static_cast<double>(p));
  const double llp = std::log(lp);
  const double shape = std::pow(static_cast<double>(p), 1.5) * lp * llp * llp;
  r.bound = c1 * shape;
  r.pass = static_cast<double>(r.count) <= r.bound;
  r.min_c1 = static_cast<double>(r.count) / shape;
  r.small_p = p < 16;
  return r;
}

SeriesValue delaunay_proportion(u64 p, double tol) {
  if (p < 3) throw InputError("p must be >= 3");
  if (!(tol > 0)) throw InputError("tolerance must be positive");
  const double q = 1.0 / static_cast<double>(p);
  SeriesValue s;
  double prod = 1.0;
  double qpow = q;  // q^(2k-1) for the next factor
  for (u64 k = 1;; ++k) {
    prod *= 1.0 - qpow;
    qpow *= q * q;
    // tail factors 1 - q^(2i-1), i > k: 1 - their product <= q^(2k+1) / (1 - q^2)
    const double bound = 0.5 * prod * qpow / (1.0 - q * q);
    s.terms = k;
    if (bound < tol || k > 200) {
      s.value = 0.5 * (1.0 - prod);
      s.error_bound = bound;
      return s;
    }
  }
}

SeriesValue zeta_tail(double s, double tol) {
  if (!(s > 1)) throw InputError("zeta_tail needs s > 1");
  if (!(tol > 0)) throw InputError("tolerance must be positive");
  SeriesValue r;
  double sum = 0;
  u64 k = 2;
  const u64 cap = 100000000;
  for (;; ++k) {
    sum += std::pow(static_cast<double>(k), -s);
    // sum_{j > k} j^-s lies in [(k+1)^(1-s), k^(1-s)] / (s-1)
    const double upper = std::pow(static_cast<double>(k), 1 - s) / (s - 1);
    const double lower = std::pow(static_cast<double>(k + 1), 1 - s) / (s - 1);
    const double half = 0.5 * (upper - lower);
    if (half < tol || k >= cap) {
      r.value = sum + 0.5 * (upper + lower);
      r.error_bound = half;
      r.terms = k - 1;
      return r;
    }
  }
}

LowerBound lower_bound_density(u64 p, double c1) {
  if (p < 11) throw InputError("lower bound needs p >= 11");
  LowerBound b;
  const double tol = 1e-12;
  const auto del = delaunay_proportion(p, tol);
  const auto zp = zeta_tail(static_cast<double>(p), tol);
  const auto z10 = zeta_tail(10.0, tol);
  const double lp = std::log(static_cast<double>(p));
  const double llp = std::log(lp);
  b.one_sixth = 1.0 / 6.0;
  b.inv_p = 1.0 / static_cast<double>(p);
  b.delaunay = del.value;
  b.zeta_p_tail = zp.value;
  b.sqrt_term = (1.0 + z10.value) * c1 * lp * llp * llp / std::sqrt(static_cast<double>(p));
  b.value = b.one_sixth - b.inv_p - b.delaunay - b.zeta_p_tail - b.sqrt_term;
  b.error_bound = del.error_bound + zp.error_bound + z10.error_bound * c1 * lp * llp * llp / std::sqrt(static_cast<double>(p));
  return b;
}

SweepResult population_sweep(u64 ell, const std::vector<u64>& height_checkpoints) {
  if (!is_prime(ell)) throw InputError(std::to_string(ell) + " is not prime");
  if (height_checkpoints.empty()) throw InputError("no checkpoints");
  std::vector<u64> xs = height_checkpoints;
  std::sort(xs.begin(), xs.end());
  const u64 xmax = xs.back();
  SweepResult r;
  r.param = "ell=" + std::to_string(ell);
  r.model_limited = ell <= 3;
  if (r.model_limited) r.notes.push_back("short models are not minimal at 2 and 3; discriminant test is biased");
  std::vector<u64> hits(xs.size(), 0), total(xs.size(), 0);
  i64 amax = 0;
  while (static_cast<u64>((amax + 1) * (amax + 1) * (amax + 1)) < xmax) ++amax;
  i64 bmax = 0;
  while (static_cast<u64>((bmax + 1) * (bmax + 1)) < xmax) ++bmax;
  for (i64 a = -amax; a <= amax; ++a)
    for (i64 b = -bmax; b <= bmax; ++b) {
      const u64 h = height(a, b);
      if (h >= xmax || discriminant(a, b) == 0 || !is_minimal(a, b)) continue;
      const bool good = discriminant(a, b) % static_cast<i128>(ell) != 0;
      for (std::size_t i = 0; i < xs.size(); ++i)
        if (h < xs[i]) {
          ++total[i];
          if (good) ++hits[i];
        }
    }
  const double ref = 1.0 - 1.0 / static_cast<double>(ell);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    SweepPoint pt{xs[i], hits[i], total[i], total[i] ? static_cast<double>(hits[i]) / static_cast<double>(total[i]) : 0.0,
                  ref, 0.0};
    pt.rel_error = std::fabs(pt.ratio - ref) / ref;
    r.series.push_back(pt);
  }
  r.empty = total.front() == 0;
  return r;
}

}  // namespace ecstab
