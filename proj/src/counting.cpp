#include "ecstab/counting.hpp"

#include <random>
#include <unordered_map>
#include <vector>

namespace ecstab {

namespace {

struct Point {
  u64 x = 0;
  u64 y = 0;
  bool inf = true;
  friend bool operator==(const Point& p, const Point& q) {
    return p.inf == q.inf && (p.inf || (p.x == q.x && p.y == q.y));
  }
};

class Group {
 public:
  explicit Group(const CurveFp& c) : l_(c.ell), a_(c.a) {}

  Point neg(const Point& p) const { return p.inf ? p : Point{p.x, p.y == 0 ? 0 : l_ - p.y, false}; }

  Point add(const Point& p, const Point& q) const {
    if (p.inf) return q;
    if (q.inf) return p;
    u64 lambda;
    if (p.x == q.x) {
      if (p.y != q.y || p.y == 0) return Point{};
      const u64 num = add_mod(mul_mod(3, mul_mod(p.x, p.x, l_), l_), a_, l_);
      lambda = mul_mod(num, *inverse_mod(add_mod(p.y, p.y, l_), l_), l_);
    } else {
      lambda = mul_mod(sub_mod(q.y, p.y, l_), *inverse_mod(sub_mod(q.x, p.x, l_), l_), l_);
    }
    const u64 x3 = sub_mod(sub_mod(mul_mod(lambda, lambda, l_), p.x, l_), q.x, l_);
    const u64 y3 = sub_mod(mul_mod(lambda, sub_mod(p.x, x3, l_), l_), p.y, l_);
    return Point{x3, y3, false};
  }

  Point mul(Point p, u64 k) const {
    Point r;
    while (k) {
      if (k & 1) r = add(r, p);
      p = add(p, p);
      k >>= 1;
    }
    return r;
  }

 private:
  u64 l_;
  u64 a_;
};

struct PointHash {
  std::size_t operator()(const Point& p) const { return std::hash<u64>{}(p.x * 0x9E3779B97F4A7C15ULL ^ p.y); }
};

// Some N in [lo, hi] with N*P = O; the true group order guarantees one exists.
std::optional<u64> annihilator_in_interval(const Group& g, const Point& p, u64 lo, u64 hi) {
  const u64 width = hi - lo;
  const u64 s = isqrt(width) + 1;
  std::unordered_map<Point, u64, PointHash> baby;
  baby.reserve(2 * s);
  Point jp = p;
  for (u64 j = 1; j < s; ++j) {
    if (jp.inf) {
      // ord(P) = j; return its least multiple in range.
      const u64 first = (lo + j - 1) / j * j;
      if (first <= hi) return first;
      return std::nullopt;
    }
    baby.emplace(jp, j);
    jp = g.add(jp, p);
  }
  const Point step = g.mul(p, s);
  Point r = g.mul(p, lo);
  for (u64 base = lo; base <= hi; base += s) {
    if (r.inf) return base;
    auto it = baby.find(g.neg(r));
    if (it != baby.end() && base + it->second <= hi) return base + it->second;
    r = g.add(r, step);
  }
  return std::nullopt;
}

u64 point_order(const Group& g, const Point& p, u64 multiple) {
  u64 order = multiple;
  for (auto [q, e] : factor(multiple)) {
    for (int i = 0; i < e; ++i) {
      if (g.mul(p, order / q).inf)
        order /= q;
      else
        break;
    }
  }
  return order;
}

}  // namespace

u64 count_points_exhaustive(const CurveFp& c) {
  const u64 l = c.ell;
  u64 count = 1;  // point at infinity
  // f(x) = x^3 + a x + b stepped by finite differences.
  u64 f = c.b % l;
  u64 d1 = add_mod(1 % l, c.a % l, l);
  u64 d2 = 6 % l;
  const u64 d3 = 6 % l;
  if (l < (u64{1} << 27)) {
    std::vector<unsigned char> roots(l, 0);
    for (u64 y = 0; y < l; ++y) ++roots[mul_mod(y, y, l)];
    for (u64 x = 0; x < l; ++x) {
      count += roots[f];
      f = add_mod(f, d1, l);
      d1 = add_mod(d1, d2, l);
      d2 = add_mod(d2, d3, l);
    }
  } else {
    for (u64 x = 0; x < l; ++x) {
      count += static_cast<u64>(1 + legendre(f, l));
      f = add_mod(f, d1, l);
      d1 = add_mod(d1, d2, l);
      d2 = add_mod(d2, d3, l);
    }
  }
  return count;
}

BsgsOutcome count_points_bsgs(const CurveFp& c) {
  const u64 l = c.ell;
  const u64 half_width = isqrt(4 * l);
  const u64 lo = l + 1 - half_width;
  const u64 hi = l + 1 + half_width;
  const Group g(c);
  std::mt19937_64 rng(l * 0x9E3779B97F4A7C15ULL ^ (c.a << 17) ^ (c.b << 3) ^ 0x5851F42D4C957F2DULL);
  u64 exponent_bound = 1;
  BsgsOutcome out;
  // Tiny fields can have no affine points at all, so draws are capped too.
  for (int draws = 0; out.points_used < 16 && draws < 1024; ++draws) {
    const u64 x = rng() % l;
    const u64 rhs = add_mod(add_mod(mul_mod(mul_mod(x, x, l), x, l), mul_mod(c.a, x, l), l), c.b, l);
    auto y = sqrt_mod(rhs, l);
    if (!y) continue;
    const Point p{x, *y, false};
    ++out.points_used;
    auto n = annihilator_in_interval(g, p, lo, hi);
    if (!n) break;  // unreachable for a valid curve; fall back
    exponent_bound = lcm(exponent_bound, point_order(g, p, *n));
    const u64 first = (lo + exponent_bound - 1) / exponent_bound * exponent_bound;
    if (first <= hi && first + exponent_bound > hi) {
      out.count = first;
      return out;
    }
  }
  out.fell_back = true;
  out.count = count_points_exhaustive(c);
  return out;
}

u64 count_points(const CurveFp& curve, const CountOptions& options) {
  if (curve.ell < options.exhaustive_threshold) return count_points_exhaustive(curve);
  return count_points_bsgs(curve).count;
}

}  // namespace ecstab
