#include <algorithm>

#include "doctest.h"
#include "ecstab/stability.hpp"
#include "oracles.hpp"

using namespace ecstab;

namespace {

const CurveArithRecord& dataset(std::string_view label) {
  static const IngestReport report = ingest_records(std::string(ECSTAB_TEST_DATA) + "/curves.jsonl");
  const auto* r = report.find(label);
  REQUIRE(r != nullptr);
  return *r;
}

CurveArithRecord plain_record(i64 a, i64 b) {
  CurveArithRecord r;
  r.label = "plain";
  r.curve = CurveQ::make(a, b);
  r.rank = 0;
  r.torsion_order = 1;
  r.sha_order = 1;
  for (u64 l : prime_divisors(r.curve->discriminant())) r.tamagawa[l] = 1;
  return r;
}

bool contains(const std::vector<u64>& v, u64 x) { return std::find(v.begin(), v.end(), x) != v.end(); }

const Condition* reason(const PEVerdict& v, std::string_view name) {
  for (const auto& c : v.reasons)
    if (c.name == name) return &c;
  return nullptr;
}

const Check* hypothesis(const StabilityCertificate& c, std::string_view name) {
  for (const auto& h : c.hypotheses)
    if (h.name == name) return &h;
  return nullptr;
}

}  // namespace

TEST_CASE("Q1 and Q2 for y^2 = x^3 + x + 1 at p = 5") {
  const auto e = CurveQ::make(1, 1);
  const auto q = compute_q1_q2(e, 5, 50);
  for (u64 l : q.q1) CHECK((l == 2 || l == 31));
  CHECK(contains(q.q1, 31));
  CHECK(oracle::brute_count(7, 1, 1) == 5);
  CHECK(contains(q.q2, 7));
  CHECK(q.q2_truncated);
  for (u64 l : q.q2) CHECK(oracle::brute_count(l, 1, 1) % 5 == 0);
  CHECK_FALSE(contains(q.q1, 5));
  CHECK(compute_q1_q2(e, 31, 50).q1 == std::vector<u64>{2});
  CHECK(compute_q1_q2(e, 5, 1).q2.empty());
}

TEST_CASE("S and T enumeration") {
  const auto e = CurveQ::make(1, 1);
  const auto s = enumerate_congruence_primes(e, 3, 1, 13, PrimeMode::S);
  CHECK(contains(s, 7));
  CHECK_FALSE(contains(s, 13));
  const auto t = enumerate_congruence_primes(e, 3, 1, 13, PrimeMode::T);
  CHECK(contains(t, 13));
  CHECK_FALSE(contains(t, 7));
  CHECK(enumerate_congruence_primes(e, 5, 2, 50, PrimeMode::S).empty());
}

TEST_CASE("S and T partition the good congruence class") {
  const auto e = CurveQ::make(1, 1);
  for (u64 p : {3u, 5u, 7u}) {
    const auto s = enumerate_congruence_primes(e, p, 1, 5000, PrimeMode::S);
    const auto t = enumerate_congruence_primes(e, p, 1, 5000, PrimeMode::T);
    std::size_t cls = 0;
    for (u64 l : primes_in(2, 5000))
      if (l % p == 1 && l != 31 && l != 2) {
        ++cls;
        CHECK(contains(s, l) != contains(t, l));
        CHECK(contains(t, l) == (oracle::brute_count(l, 1, 1) % p == 0));
      }
    CHECK(s.size() + t.size() == cls);
  }
}

TEST_CASE("14a1 is in P_E at 13 and not at 11") {
  const auto& r = dataset("14a1");
  const auto e = *r.curve;
  const auto v13 = check_pe_membership(e, 13, r);
  CHECK(v13.member);
  CHECK_FALSE(v13.conditional);
  // a_11 = 0 on 14a1: supersingular, so the ordinary condition fails
  const auto v11 = check_pe_membership(e, 11, r);
  CHECK_FALSE(v11.member);
  REQUIRE(reason(v11, "good_ordinary") != nullptr);
  CHECK(reason(v11, "good_ordinary")->status == Status::fail);
  CHECK(reason(v11, "tamagawa_prime_to_p")->status == Status::pass);
  CHECK(reason(v11, "sha_p_trivial")->status == Status::pass);
}

TEST_CASE("membership fails at p = 2 and when p divides Sha") {
  const auto& r = dataset("14a1");
  const auto v2 = check_pe_membership(*r.curve, 2, r);
  CHECK_FALSE(v2.member);
  CHECK(reason(v2, "p_odd")->status == Status::fail);

  auto r2 = r;
  r2.sha_p_valuation[13] = 1;
  const auto v = check_pe_membership(*r.curve, 13, r2);
  CHECK_FALSE(v.member);
  CHECK(reason(v, "sha_p_trivial")->status == Status::fail);
}

TEST_CASE("missing data makes the verdict conditional, never a silent pass") {
  auto r = dataset("14a1");
  r.sha_order.reset();
  r.sha_p_valuation.clear();
  r.tamagawa.erase(7);
  const auto v = check_pe_membership(*r.curve, 13, r);
  CHECK(v.member);
  CHECK(v.conditional);
  CHECK(reason(v, "sha_p_trivial")->status == Status::assumed);
  CHECK(reason(v, "tamagawa_prime_to_p")->status == Status::assumed);
  CHECK(std::find(v.assumptions.begin(), v.assumptions.end(), "Sha[p^infty]=0 assumed") != v.assumptions.end());
}

TEST_CASE("member iff no condition fails, over many primes") {
  const auto& r = dataset("11a1");
  for (u64 p : primes_in(3, 200)) {
    const auto v = check_pe_membership(*r.curve, p, r);
    const bool any_fail = std::any_of(v.reasons.begin(), v.reasons.end(),
                                      [](const Condition& c) { return c.status == Status::fail; });
    CHECK(v.member == !any_fail);
  }
  // 11a1 has c_11 = 5 and rational 5-torsion: 5 is excluded
  CHECK_FALSE(check_pe_membership(*r.curve, 5, r).member);
}

TEST_CASE("positive rank needs a unit regulator") {
  const auto& r = dataset("37a1");
  for (u64 p : {5u, 7u, 11u}) {
    const auto v = check_pe_membership(*r.curve, p, r);
    const auto* reg = reason(v, "regulator_unit");
    REQUIRE(reg != nullptr);
    if (reg->status == Status::fail) CHECK_FALSE(v.member);
  }
}

TEST_CASE("exceptional set screen") {
  const auto& r = dataset("14a1");
  const auto s = exceptional_set_screen(*r.curve, 11, r);
  CHECK(s.applicable);
  CHECK(s.excluded);
  const auto t = std::find_if(s.conditions.begin(), s.conditions.end(),
                              [](const ScreenCondition& c) { return c.name == "torsion_p_power"; });
  REQUIRE(t != s.conditions.end());
  CHECK(t->status == ScreenStatus::excludes);

  auto r5 = dataset("11a1");
  const auto s5 = exceptional_set_screen(*r5.curve, 5, r5);
  const auto t5 = std::find_if(s5.conditions.begin(), s5.conditions.end(),
                               [](const ScreenCondition& c) { return c.name == "torsion_p_power"; });
  CHECK(t5->status == ScreenStatus::holds);

  const auto s7 = exceptional_set_screen(*r.curve, 7, r);
  CHECK(s7.excluded);  // 7 | N, but 6 is not a power of 7

  const auto plain = plain_record(1, 1);
  CHECK(exceptional_set_screen(*plain.curve, 7, plain).excluded);
  CHECK_FALSE(exceptional_set_screen(*dataset("37a1").curve, 7, dataset("37a1")).applicable);
}

TEST_CASE("certify smoke test at p = 3 below the Mordell-Weil bar") {
  const auto r = plain_record(1, 1);
  const std::vector<u64> sigma{2};
  const auto c = certify_stability(*r.curve, 3, 1, sigma, r);
  REQUIRE(c.chosen_primes.size() == 2);
  const auto s = enumerate_congruence_primes(*r.curve, 3, 1, 1000, PrimeMode::S);
  for (u64 l : c.chosen_primes) CHECK(contains(s, l));
  CHECK(c.chosen_primes[0] == 7);
  CHECK(character_order(c.character) == 3);
  CHECK(frobenius_image(c.character, 2) == 0);
  for (const auto& h : c.hypotheses)
    if (h.name != "p_at_least_11" && h.name != "pe_membership") CHECK_MESSAGE(h.pass, h.name);
  bool mw = true;
  for (const auto& k : c.conclusions)
    if (k.name == "mordell_weil_stable") mw = k.asserted;
  CHECK_FALSE(mw);
}

TEST_CASE("empty split set gives the degree p^n subfield of one cyclotomic field") {
  const auto& r = dataset("14a1");
  const auto c = certify_stability(*r.curve, 13, 1, std::vector<u64>{}, r);
  REQUIRE(c.chosen_primes.size() == 1);
  CHECK(c.character.moduli == c.chosen_primes);
  CHECK(c.chosen_primes[0] % 13 == 1);
  CHECK(c.all_asserted());
  CHECK(c.kida.p1_e.empty());
  CHECK(c.kida.p2_e.empty());
}

TEST_CASE("14a1 at 13 split at 2 and 7 asserts every conclusion") {
  const auto& r = dataset("14a1");
  const std::vector<u64> sigma{2, 7};
  const auto c = certify_stability(*r.curve, 13, 1, sigma, r);
  CHECK(c.chosen_primes.size() == 3);
  for (u64 l : c.chosen_primes) {
    CHECK(l % 13 == 1);
    CHECK(count_points(std::get<CurveFp>(reduce_mod(*r.curve, l))) % 13 != 0);
  }
  CHECK(c.all_asserted());
  CHECK(c.assumption_flags.empty());
  CHECK(c.kida_lambda_value == 0);
}

TEST_CASE("14a1 at 11 is emitted with conclusions withheld") {
  const auto& r = dataset("14a1");
  const auto c = certify_stability(*r.curve, 11, 1, std::vector<u64>{2, 7}, r);
  CHECK(c.chosen_primes.size() == 3);
  CHECK_FALSE(hypothesis(c, "pe_membership")->pass);
  CHECK_FALSE(c.any_asserted());
  CHECK(hypothesis(c, "ramified_disjoint_from_Q1_Q2")->pass);
}

TEST_CASE("missing Sha propagates as an assumption flag") {
  auto r = plain_record(1, 1);
  r.sha_order.reset();
  const auto c = certify_stability(*r.curve, 3, 1, std::vector<u64>{}, r);
  CHECK(std::find(c.assumption_flags.begin(), c.assumption_flags.end(), "Sha[p^infty]=0 assumed") !=
        c.assumption_flags.end());
}

TEST_CASE("selection exhaustion carries statistics") {
  const auto r = plain_record(1, 1);
  CertifyOptions o;
  o.prime_budget = 50;
  try {
    certify_stability(*r.curve, 5, 2, std::vector<u64>{}, r, o);
    FAIL("expected exhaustion");
  } catch (const SelectionExhausted& ex) {
    CHECK(ex.stats.hi == 50);
    CHECK(ex.stats.needed == 1);
    CHECK(ex.stats.qualifying == 0);
  }
}

TEST_CASE("certificates from the stability builder induce empty Kida data") {
  const auto r = plain_record(1, 1);
  for (u64 p : {3u, 5u, 7u})
    for (unsigned n : {1u, 2u})
      for (std::size_t t = 0; t < 3; ++t) {
        const auto small = primes_in(2, 30);
        std::vector<u64> sigma(small.begin(), small.begin() + static_cast<std::ptrdiff_t>(t));
        sigma.erase(std::remove(sigma.begin(), sigma.end(), p), sigma.end());
        const auto c = certify_stability(*r.curve, p, n, sigma, r);
        CHECK(c.kida.p1_e.empty());
        CHECK(c.kida.p2_e.empty());
        CHECK(c.kida_gaps.empty());
      }
}

TEST_CASE("selmer growth certificate for y^2 = x^3 + x + 1 at p = 3") {
  const auto r = plain_record(1, 1);
  const auto c = selmer_growth_certificate(*r.curve, 3, 1, std::vector<u64>{}, r);
  CHECK(c.kind == "selmer_growth");
  CHECK(contains(c.character.moduli, 13));
  CHECK(ramification_index(c.character, 13) == 3);
  CHECK(hypothesis(c, "ramified_meets_T")->pass);
  CHECK(hypothesis(c, "ramified_good_reduction")->pass);
  CHECK_FALSE(hypothesis(c, "p_at_least_5")->pass);
}

TEST_CASE("selmer growth with 13 in the split set avoids it") {
  const auto r = plain_record(1, 1);
  const auto c = selmer_growth_certificate(*r.curve, 3, 1, std::vector<u64>{13}, r);
  CHECK_FALSE(contains(c.character.moduli, 13));
  CHECK(frobenius_image(c.character, 13) == 0);
}

TEST_CASE("selmer growth at p = 13 on 14a1") {
  const auto& r = dataset("14a1");
  const auto c = selmer_growth_certificate(*r.curve, 13, 1, std::vector<u64>{}, r);
  CHECK(c.all_asserted());
  for (u64 l : ramified_primes(c.character)) CHECK(reduction_type(*r.curve, l) == ReductionType::good);
}

TEST_CASE("positive rank routes to the trichotomy") {
  const auto& r = dataset("37a1");
  const auto c = selmer_growth_certificate(*r.curve, 5, 1, std::vector<u64>{}, r);
  CHECK(c.kind == "not_applicable");
  CHECK_FALSE(c.any_asserted());
}

TEST_CASE("positive rank trichotomy") {
  auto r = dataset("37a1");
  r.regulator_valuation[5] = 0;
  r.sha_order = 1;
  PartialRecordL empty{5, {}, {}, {}};
  const auto open = positive_rank_trichotomy(r, 5, empty);
  CHECK(open.applicable);
  CHECK(open.rank_growth == Assertion::open);
  CHECK(open.regulator_drop == Assertion::open);
  CHECK(open.sha_growth == Assertion::open);

  const auto grown = positive_rank_trichotomy(r, 5, {5, 5, {}, {}});
  CHECK(grown.rank_growth == Assertion::confirmed);

  const auto bad = positive_rank_trichotomy(r, 5, {5, 1, 0, 0});
  CHECK(bad.inconsistent);

  CHECK_FALSE(positive_rank_trichotomy(dataset("14a1"), 13, {13, 0, {}, {}}).applicable);
}
