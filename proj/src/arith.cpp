#include "ecstab/arith.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ecstab {

namespace {

u128 mul_mod_wide(u128 a, u128 b, u128 m) {
  // Double-and-add keeps intermediates below 2m; m < 2^127 here.
  u128 r = 0;
  a %= m;
  while (b) {
    if (b & 1) {
      r += a;
      if (r >= m) r -= m;
    }
    a += a;
    if (a >= m) a -= m;
    b >>= 1;
  }
  return r;
}

u128 pow_mod_wide(u128 base, u128 exp, u128 m) {
  u128 r = 1 % m;
  base %= m;
  while (exp) {
    if (exp & 1) r = mul_mod_wide(r, base, m);
    base = mul_mod_wide(base, base, m);
    exp >>= 1;
  }
  return r;
}

template <typename T, typename Mul, typename Pow>
bool miller_rabin(T n, Mul mul, Pow pw) {
  if (n < 2) return false;
  static constexpr unsigned small[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41};
  for (unsigned q : small) {
    if (n == q) return true;
    if (n % q == 0) return false;
  }
  T d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (unsigned a : small) {
    T x = pw(T(a), d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mul(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

u64 pollard_brent(u64 n) {
  if (n % 2 == 0) return 2;
  for (u64 c = 1;; ++c) {
    u64 y = 2, x = 2, g = 1, q = 1, ys = 2;
    u64 r = 1;
    const u64 m = 128;
    auto f = [&](u64 v) { return add_mod(mul_mod(v, v, n), c, n); };
    do {
      x = y;
      for (u64 i = 0; i < r; ++i) y = f(y);
      u64 k = 0;
      do {
        ys = y;
        for (u64 i = 0; i < std::min(m, r - k); ++i) {
          y = f(y);
          q = mul_mod(q, x > y ? x - y : y - x, n);
        }
        g = gcd(q, n);
        k += m;
      } while (k < r && g == 1);
      r *= 2;
    } while (g == 1);
    if (g == n) {
      do {
        ys = f(ys);
        g = gcd(x > ys ? x - ys : ys - x, n);
      } while (g == 1);
    }
    if (g != n) return g;
  }
}

u128 pollard_brent_wide(u128 n) {
  if (n % 2 == 0) return 2;
  for (u128 c = 1;; ++c) {
    u128 y = 2, x = 2, g = 1, q = 1, ys = 2;
    u128 r = 1;
    const u128 m = 64;
    auto f = [&](u128 v) {
      u128 s = mul_mod_wide(v, v, n) + c;
      return s >= n ? s - n : s;
    };
    do {
      x = y;
      for (u128 i = 0; i < r; ++i) y = f(y);
      u128 k = 0;
      do {
        ys = y;
        for (u128 i = 0; i < std::min(m, r - k); ++i) {
          y = f(y);
          q = mul_mod_wide(q, x > y ? x - y : y - x, n);
        }
        g = gcd(q, n);
        k += m;
      } while (k < r && g == 1);
      r *= 2;
    } while (g == 1);
    if (g == n) {
      do {
        ys = f(ys);
        g = gcd(x > ys ? x - ys : ys - x, n);
      } while (g == 1);
    }
    if (g != n) return g;
  }
}

void factor_into(u64 n, std::vector<u64>& out) {
  if (n == 1) return;
  if (is_prime(n)) {
    out.push_back(n);
    return;
  }
  u64 d = pollard_brent(n);
  factor_into(d, out);
  factor_into(n / d, out);
}

void factor_into(u128 n, std::vector<u128>& out) {
  if (n == 1) return;
  if (n >> 64 == 0) {
    std::vector<u64> small;
    factor_into(static_cast<u64>(n), small);
    out.insert(out.end(), small.begin(), small.end());
    return;
  }
  if (is_prime(n)) {
    out.push_back(n);
    return;
  }
  u128 d = pollard_brent_wide(n);
  factor_into(d, out);
  factor_into(n / d, out);
}

template <typename T>
std::vector<std::pair<T, int>> group(std::vector<T> v) {
  std::sort(v.begin(), v.end());
  std::vector<std::pair<T, int>> out;
  for (T q : v) {
    if (!out.empty() && out.back().first == q)
      ++out.back().second;
    else
      out.emplace_back(q, 1);
  }
  return out;
}

}  // namespace

u64 pow_mod(u64 base, u64 exp, u64 m) {
  u64 r = 1 % m;
  base %= m;
  while (exp) {
    if (exp & 1) r = mul_mod(r, base, m);
    base = mul_mod(base, base, m);
    exp >>= 1;
  }
  return r;
}

std::optional<u64> inverse_mod(u64 a, u64 m) {
  i128 t = 0, new_t = 1;
  i128 r = m, new_r = a % m;
  while (new_r != 0) {
    i128 q = r / new_r;
    std::tie(t, new_t) = std::make_pair(new_t, t - q * new_t);
    std::tie(r, new_r) = std::make_pair(new_r, r - q * new_r);
  }
  if (r != 1) return std::nullopt;
  if (t < 0) t += m;
  return static_cast<u64>(t);
}

u64 gcd(u64 a, u64 b) { return std::gcd(a, b); }

u128 gcd(u128 a, u128 b) {
  while (b) {
    u128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

u64 lcm(u64 a, u64 b) { return a / gcd(a, b) * b; }

u64 isqrt(u64 n) {
  u64 r = static_cast<u64>(std::sqrt(static_cast<long double>(n)));
  while (r > 0 && static_cast<u128>(r) * r > n) --r;
  while (static_cast<u128>(r + 1) * (r + 1) <= n) ++r;
  return r;
}

bool is_prime(u64 n) {
  return miller_rabin<u64>(
      n, [](u64 a, u64 b, u64 m) { return mul_mod(a, b, m); },
      [](u64 a, u64 e, u64 m) { return pow_mod(a, e, m); });
}

bool is_prime(u128 n) {
  if (n >> 64 == 0) return is_prime(static_cast<u64>(n));
  return miller_rabin<u128>(n, mul_mod_wide, pow_mod_wide);
}

int legendre(u64 a, u64 p) {
  a %= p;
  if (a == 0) return 0;
  return pow_mod(a, (p - 1) / 2, p) == 1 ? 1 : -1;
}

std::optional<u64> sqrt_mod(u64 a, u64 p) {
  a %= p;
  if (a == 0) return 0;
  if (p == 2) return a;
  if (legendre(a, p) != 1) return std::nullopt;
  if (p % 4 == 3) return pow_mod(a, (p + 1) / 4, p);
  // Tonelli-Shanks
  u64 q = p - 1;
  int s = 0;
  while ((q & 1) == 0) {
    q >>= 1;
    ++s;
  }
  u64 z = 2;
  while (legendre(z, p) != -1) ++z;
  u64 c = pow_mod(z, q, p);
  u64 x = pow_mod(a, (q + 1) / 2, p);
  u64 t = pow_mod(a, q, p);
  int m = s;
  while (t != 1) {
    int i = 0;
    u64 tt = t;
    while (tt != 1) {
      tt = mul_mod(tt, tt, p);
      ++i;
    }
    u64 b = c;
    for (int j = 0; j < m - i - 1; ++j) b = mul_mod(b, b, p);
    x = mul_mod(x, b, p);
    c = mul_mod(b, b, p);
    t = mul_mod(t, c, p);
    m = i;
  }
  return x;
}

int valuation(u128 n, u64 p) {
  if (n == 0) throw InputError("valuation of zero");
  int v = 0;
  while (n % p == 0) {
    n /= p;
    ++v;
  }
  return v;
}

int valuation(i128 n, u64 p) { return valuation(static_cast<u128>(n < 0 ? -n : n), p); }

std::vector<std::pair<u64, int>> factor(u64 n) {
  if (n == 0) throw InputError("cannot factor zero");
  std::vector<u64> primes;
  for (u64 q : {2u, 3u, 5u, 7u, 11u, 13u}) {
    while (n % q == 0) {
      primes.push_back(q);
      n /= q;
    }
  }
  factor_into(n, primes);
  return group(std::move(primes));
}

std::vector<std::pair<u128, int>> factor(u128 n) {
  if (n == 0) throw InputError("cannot factor zero");
  std::vector<u128> primes;
  for (u64 q = 2; q < 1000 && n >> 64 != 0; q += (q == 2 ? 1 : 2)) {
    while (n % q == 0) {
      primes.push_back(q);
      n /= q;
    }
  }
  factor_into(n, primes);
  return group(std::move(primes));
}

std::vector<u64> prime_divisors(i128 n) {
  if (n == 0) throw InputError("prime divisors of zero");
  std::vector<u64> out;
  for (auto [q, e] : factor(static_cast<u128>(n < 0 ? -n : n))) {
    (void)e;
    if (q >> 64) throw InputError("prime divisor exceeds 64 bits");
    out.push_back(static_cast<u64>(q));
  }
  return out;
}

u64 primitive_root(u64 p) {
  if (!is_prime(p)) throw InputError("primitive_root: modulus " + std::to_string(p) + " is not prime");
  if (p == 2) return 1;
  auto fs = factor(p - 1);
  for (u64 g = 2;; ++g) {
    bool ok = true;
    for (auto [q, e] : fs) {
      (void)e;
      if (pow_mod(g, (p - 1) / q, p) == 1) {
        ok = false;
        break;
      }
    }
    if (ok) return g;
  }
}

u64 checked_pow(u64 p, unsigned k) {
  u128 r = 1;
  for (unsigned i = 0; i < k; ++i) {
    r *= p;
    if (r >> 63) throw InputError("prime power overflows 63 bits");
  }
  return static_cast<u64>(r);
}

void for_each_prime(u64 lo, u64 hi, const std::function<void(u64)>& fn) {
  if (hi < 2 || lo > hi) return;
  lo = std::max<u64>(lo, 2);
  const u64 root = isqrt(hi);
  std::vector<char> small(root + 1, 1);
  std::vector<u64> base;
  for (u64 i = 2; i <= root; ++i) {
    if (!small[i]) continue;
    base.push_back(i);
    for (u64 j = i * i; j <= root; j += i) small[j] = 0;
  }
  const u64 segment = 1 << 18;
  std::vector<char> mark(segment);
  for (u64 start = lo; start <= hi; start += segment) {
    const u64 end = std::min(hi, start + segment - 1);
    std::fill(mark.begin(), mark.begin() + (end - start + 1), 1);
    for (u64 q : base) {
      if (q * q > end) break;
      u64 first = std::max(q * q, (start + q - 1) / q * q);
      for (u64 j = first; j <= end; j += q) mark[j - start] = 0;
    }
    for (u64 v = start; v <= end; ++v)
      if (mark[v - start]) fn(v);
    if (end == hi) break;
  }
}

std::vector<u64> primes_in(u64 lo, u64 hi) {
  std::vector<u64> out;
  for_each_prime(lo, hi, [&](u64 l) { out.push_back(l); });
  return out;
}

u64 prime_pi(u64 x) {
  u64 count = 0;
  for_each_prime(2, x, [&](u64) { ++count; });
  return count;
}

std::string to_string(u128 v) {
  if (v == 0) return "0";
  std::string s;
  while (v) {
    s.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  return {s.rbegin(), s.rend()};
}

std::string to_string(i128 v) {
  if (v < 0) return "-" + to_string(static_cast<u128>(-v));
  return to_string(static_cast<u128>(v));
}

}  // namespace ecstab
