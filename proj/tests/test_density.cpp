#include <cmath>

#include "doctest.h"
#include "ecstab/density.hpp"
#include "oracles.hpp"

using namespace ecstab;

TEST_CASE("S density closed forms") {
  const auto d51 = theoretical_s_density(5, 1);
  CHECK(d51.value == Rational::make(19, 96));
  CHECK(d51.value == d51.alternate);
  CHECK_FALSE(d51.small_p_warning);
  CHECK(theoretical_s_density(5, 2).value == Rational::make(19, 480));
  const auto d32 = theoretical_s_density(3, 2);
  CHECK(d32.value == Rational::make(5, 48));
  CHECK(d32.small_p_warning);
  for (u64 p : {3u, 5u, 7u, 11u, 13u, 101u})
    for (unsigned n : {1u, 2u, 3u}) {
      const auto d = theoretical_s_density(p, n);
      CHECK(d.value == d.alternate);
      // S and T fill the class 1 mod p^n, of density 1 / phi(p^n)
      const u64 phi = checked_pow(p, n - 1) * (p - 1);
      const auto sum = d.value.to_double() + theoretical_t_density(p, n).to_double();
      CHECK(sum == doctest::Approx(1.0 / static_cast<double>(phi)).epsilon(1e-12));
    }
}

TEST_CASE("SL2 trace count") {
  CHECK(sl2_trace_count(3) == std::pair<u64, u64>{15, 15});
  CHECK(sl2_trace_count(5) == std::pair<u64, u64>{95, 95});
  // 7^3 - 7^2 - 7 = 287
  CHECK(sl2_trace_count(7) == std::pair<u64, u64>{287, 287});
  for (u64 p : {11u, 13u}) {
    const auto [brute, closed] = sl2_trace_count(p);
    CHECK(brute == closed);
    CHECK(closed == p * p * p - p * p - p);
  }
}

TEST_CASE("T_p count: two oracles, twist closure, and an independent recount") {
  for (u64 p : {5u, 7u, 11u, 13u}) {
    const auto t = count_tp(p);
    CHECK(t.agree());
    CHECK(t.members.size() == t.character_sum);
    CHECK(tp_twist_closed(p, t.members));
    u64 brute = 0;
    for (u64 a = 0; a < p; ++a)
      for (u64 b = 0; b < p; ++b) {
        if ((4 * a * a * a + 27 * b * b) % p == 0) continue;
        const u64 n = oracle::brute_count(p, static_cast<i64>(a), static_cast<i64>(b));
        brute += n == p || n == p + 1;
      }
    CHECK(t.enumeration == brute);
  }
  CHECK(count_tp(5).enumeration == 6);
  CHECK(count_tp(7).enumeration == 10);
}

TEST_CASE("twist closure detects a missing member") {
  auto t = count_tp(7);
  REQUIRE(t.members.size() > 1);
  t.members.pop_back();
  CHECK_FALSE(tp_twist_closed(7, t.members));
}

TEST_CASE("lenstra bound") {
  const auto b = lenstra_bound_check(17, 1.0);
  CHECK(b.count == count_tp(17).enumeration);
  const double rhs = std::pow(17.0, 1.5) * std::log(17.0) * std::pow(std::log(std::log(17.0)), 2);
  CHECK(b.bound == doctest::Approx(rhs));
  CHECK(b.pass == (static_cast<double>(b.count) <= rhs));
  CHECK_FALSE(lenstra_bound_check(17, 0.0).pass);
  CHECK(lenstra_bound_check(17, b.min_c1 * 1.0000001).pass);
  bool prev = false;
  for (double c = 0.01; c < 3; c *= 1.3) {
    const bool now = lenstra_bound_check(13, c).pass;
    CHECK((!prev || now));
    prev = now;
  }
  CHECK(lenstra_bound_check(13, 1.0).small_p);
}

TEST_CASE("delaunay proportion") {
  const auto d = delaunay_proportion(11, 1e-9);
  // Three factors alone miss the 11^-7 factor, about 2.3e-8.
  const double three = 0.5 * (1 - (1 - 1.0 / 11) * (1 - std::pow(11.0, -3)) * (1 - std::pow(11.0, -5)));
  CHECK(std::fabs(d.value - three) < 3e-8);
  double prod = 1;
  for (int i = 1; i < 20; ++i) prod *= 1 - std::pow(11.0, -(2 * i - 1));
  CHECK(std::fabs(d.value - 0.5 * (1 - prod)) < 1e-9);
  CHECK(std::fabs(d.value - 0.0457988) < 1e-6);
  CHECK(d.error_bound < 1e-9);
  for (u64 p : {3u, 5u, 11u}) CHECK(delaunay_proportion(p, 1e-12).value < 1.0 / (2.0 * static_cast<double>(p - 1)));
  const auto big = delaunay_proportion(1000003, 1e-15);
  CHECK(1000003.0 * 2 * big.value == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("zeta tail") {
  const auto z = zeta_tail(10, 1e-12);
  double direct = 0;
  for (int k = 100000; k >= 2; --k) direct += std::pow(static_cast<double>(k), -10.0);
  CHECK(std::fabs(z.value - direct) < 1e-9);
  CHECK(std::fabs(z.value - 9.945751278180853e-4) < 1e-12);
  for (double s : {2.0, 3.0, 5.0, 10.0, 20.0, 40.0}) {
    const auto t = zeta_tail(s, 1e-12);
    CHECK(t.value < std::pow(2.0, -s) * (1 + 2 / (s - 1)));
    CHECK(t.value > std::pow(2.0, -s));
  }
  CHECK(zeta_tail(60, 1e-12).value < 1e-17);
  CHECK_THROWS_AS(zeta_tail(1.0, 1e-9), InputError);
}

TEST_CASE("lower bound") {
  const auto big = lower_bound_density(1000000007, 1.0);
  CHECK(std::fabs(big.value - 1.0 / 6) < 1e-2);
  CHECK(big.one_sixth == doctest::Approx(1.0 / 6));
  CHECK(big.value == doctest::Approx(big.one_sixth - big.inv_p - big.delaunay - big.zeta_p_tail - big.sqrt_term));
  const auto small = lower_bound_density(11, 1.0);
  CHECK(small.sqrt_term > small.inv_p);
  double prev = lower_bound_density(101, 1.0).value;
  for (u64 p : {1009u, 10007u, 100003u, 1000003u}) {
    const double v = lower_bound_density(p, 1.0).value;
    CHECK(v > prev);
    prev = v;
  }
  CHECK(lower_bound_density(1009, 2.0).value < lower_bound_density(1009, 1.0).value);
  CHECK_THROWS_AS(lower_bound_density(7, 1.0), InputError);
}

TEST_CASE("population sweep") {
  const auto r = population_sweep(5, {1000, 1000000});
  CHECK(r.last().reference == doctest::Approx(0.8));
  CHECK(std::fabs(r.last().ratio - 0.8) / 0.8 < 0.05);
  const auto r2 = population_sweep(2, {1000});
  CHECK(r2.last().reference == doctest::Approx(0.5));
  CHECK(r2.model_limited);
  CHECK(population_sweep(5, {1}).empty);
}

TEST_CASE("density sweep examples") {
  const auto e = CurveQ::make(1, 1);
  const auto below = empirical_density_sweep(e, 5, 2, {50}, SweepMode::S);
  CHECK(below.last().hits == 0);
  CHECK(below.empty);

  const auto s = empirical_density_sweep(e, 3, 1, {10000}, SweepMode::S);
  const auto t = empirical_density_sweep(e, 3, 1, {10000}, SweepMode::T);
  CHECK(s.last().total == prime_pi(10000));
  u64 cls = 0;
  for (u64 l : primes_in(2, 10000)) cls += l % 3 == 1 && l != 31;
  CHECK(s.last().hits + t.last().hits == cls);
  CHECK(s.last().ratio == doctest::Approx(static_cast<double>(s.last().hits) / static_cast<double>(s.last().total)));
  CHECK(s.last().rel_error ==
        doctest::Approx(std::fabs(s.last().ratio - s.last().reference) / s.last().reference));

  const auto pe = empirical_density_sweep(e, 5, 1, {10000}, SweepMode::PEc);
  CHECK(pe.last().hits > 0);
  CHECK(pe.last().reference > 0);
}

TEST_CASE("S density converges on several curves") {
  const std::vector<std::pair<i64, i64>> curves{{1, 1}, {-1, 1}, {2, 3}, {-3, 5}, {7, -2}};
  int improved = 0;
  for (auto [a, b] : curves) {
    REQUIRE(irreducibility_certificate(CurveQ::make(a, b), 5, 1000).has_value());
    const auto r = empirical_density_sweep(CurveQ::make(a, b), 5, 1, {100000, 1000000}, SweepMode::S);
    const auto& last = r.last();
    CHECK(last.rel_error < 3.0 / std::sqrt(static_cast<double>(last.hits)));
    improved += r.series[1].rel_error < r.series[0].rel_error;
  }
  CHECK(improved >= 4);
}
