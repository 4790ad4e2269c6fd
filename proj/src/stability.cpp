#include "ecstab/stability.hpp"

#include <algorithm>
#include <sstream>

namespace ecstab {

namespace {

std::string join(const std::vector<u64>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  return os.str();
}

bool contains(std::span<const u64> v, u64 x) { return std::find(v.begin(), v.end(), x) != v.end(); }

void require_odd_prime(u64 p) {
  if (p < 3 || !is_prime(p)) throw InputError("p must be an odd prime, got " + std::to_string(p));
}

bool divides_delta(const CurveQ& curve, u64 ell) { return curve.discriminant() % static_cast<i128>(ell) == 0; }

u64 reduced_count(const CurveQ& curve, u64 ell, const CountOptions& options) {
  return count_points(std::get<CurveFp>(reduce_mod(curve, ell)), options);
}

void validate_sigma(std::span<const u64> sigma) {
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    if (!is_prime(sigma[i])) throw InputError("split set entry " + std::to_string(sigma[i]) + " is not prime");
    if (std::count(sigma.begin(), sigma.end(), sigma[i]) > 1)
      throw InputError("split set repeats " + std::to_string(sigma[i]));
  }
}

}  // namespace

std::string_view to_string(Status s) {
  switch (s) {
    case Status::pass: return "pass";
    case Status::fail: return "fail";
    case Status::assumed: return "assumed";
  }
  return "fail";
}

std::string_view to_string(Assertion a) {
  switch (a) {
    case Assertion::confirmed: return "confirmed";
    case Assertion::refuted: return "refuted";
    case Assertion::open: return "open";
  }
  return "open";
}

Q1Q2 compute_q1_q2(const CurveQ& curve, u64 p, u64 bound, const CurveArithRecord* record, const CountOptions& options) {
  require_odd_prime(p);
  Q1Q2 out;
  out.bound = bound;
  const auto bad = (record && record->conductor) ? record->bad_primes() : prime_divisors(curve.discriminant());
  for (u64 l : bad)
    if (l != p) out.q1.push_back(l);
  if (bound >= 2) {
    for_each_prime(2, bound, [&](u64 ell) {
      // primes dividing the model discriminant are either in Q1 or beyond the
      // reach of the short model (2 and 3)
      if (ell == p || divides_delta(curve, ell)) return;
      if (reduced_count(curve, ell, options) % p == 0) out.q2.push_back(ell);
    });
  }
  return out;
}

std::vector<u64> enumerate_congruence_primes(const CurveQ& curve, u64 p, unsigned n, u64 lo, u64 hi, PrimeMode mode,
                                             const CountOptions& options) {
  require_odd_prime(p);
  if (n < 1) throw InputError("n must be >= 1");
  std::vector<u64> out;
  const u64 pn = checked_pow(p, n);
  if (hi < pn + 1) return out;
  u64 first = lo <= pn + 1 ? pn + 1 : lo + (pn - (lo - 1) % pn) % pn;
  for (u64 ell = first; ell <= hi; ell += pn) {
    if (!is_prime(ell) || divides_delta(curve, ell)) continue;
    const bool divides = reduced_count(curve, ell, options) % p == 0;
    if (divides == (mode == PrimeMode::T)) out.push_back(ell);
    if (hi - ell < pn) break;
  }
  return out;
}

PEVerdict check_pe_membership(const CurveQ& curve, u64 p, const CurveArithRecord& record,
                              const VerdictOptions& options) {
  PEVerdict v;
  auto add = [&](std::string name, Status s, std::string ev) { v.reasons.push_back({std::move(name), s, std::move(ev)}); };
  const bool odd = p >= 3 && is_prime(p);
  add("p_odd", odd ? Status::pass : Status::fail, std::to_string(p) + (odd ? " is an odd prime" : " is not an odd prime"));
  if (!odd) {
    for (const char* name : {"irreducible_mod_p", "good_ordinary", "sha_p_trivial", "tamagawa_prime_to_p",
                             "reduction_prime_to_p"})
      add(name, Status::fail, "not evaluated for p = " + std::to_string(p));
    v.member = false;
    return v;
  }

  if (auto w = irreducibility_certificate(curve, p, options.irreducibility_bound, options.count)) {
    std::ostringstream os;
    os << "x^2 - (" << w->trace << ")x + " << w->ell << " has discriminant " << w->discriminant_mod_p
       << ", a non-residue mod " << p;
    add("irreducible_mod_p", Status::pass, os.str());
  } else {
    add("irreducible_mod_p", Status::assumed, "no witness up to " + std::to_string(options.irreducibility_bound));
    v.assumptions.push_back("E[p] irreducible assumed");
  }

  const auto ord = is_good_ordinary(curve, p, options.count);
  {
    std::string ev = ord.reason;
    if (ord.trace) ev += ", a_p = " + std::to_string(*ord.trace);
    add("good_ordinary", ord.ordinary ? Status::pass : Status::fail, ev);
  }

  if (auto s = record.sha_valuation(p)) {
    add("sha_p_trivial", *s == 0 ? Status::pass : Status::fail,
        *s == 0 ? "v_p(#Sha) = 0" : "p | #Sha, v_p = " + std::to_string(*s));
  } else {
    add("sha_p_trivial", Status::assumed, "Sha not in record");
    v.assumptions.push_back("Sha[p^infty]=0 assumed");
  }

  {
    Status s = Status::pass;
    std::ostringstream os;
    for (u64 ell : record.bad_primes()) {
      if (ell == p) continue;
      if (auto c = record.tamagawa_at(ell)) {
        os << "c_" << ell << "=" << *c << " ";
        if (*c % p == 0) s = Status::fail;
      } else {
        os << "c_" << ell << " missing ";
        if (s == Status::pass) s = Status::assumed;
        v.assumptions.push_back("c_" + std::to_string(ell) + " prime to p assumed");
      }
    }
    std::string ev = os.str();
    add("tamagawa_prime_to_p", s, ev.empty() ? "no bad primes other than p" : ev);
  }

  if (divides_delta(curve, p)) {
    add("reduction_prime_to_p", Status::fail, "bad reduction at p");
  } else {
    const u64 np = reduced_count(curve, p, options.count);
    add("reduction_prime_to_p", np % p ? Status::pass : Status::fail, "#E~(F_p) = " + std::to_string(np));
  }

  if (!record.rank) {
    v.assumptions.push_back("rank 0 assumed");
  } else if (*record.rank > 0) {
    auto it = record.regulator_valuation.find(p);
    if (it == record.regulator_valuation.end()) {
      add("regulator_unit", Status::assumed, "regulator valuation not in record");
      v.assumptions.push_back("p-adic regulator unit assumed");
    } else {
      add("regulator_unit", it->second == 0 ? Status::pass : Status::fail,
          "v_p(R_p) = " + std::to_string(it->second));
    }
  }

  v.member = std::none_of(v.reasons.begin(), v.reasons.end(), [](const Condition& c) { return c.status == Status::fail; });
  v.conditional = std::any_of(v.reasons.begin(), v.reasons.end(),
                              [](const Condition& c) { return c.status == Status::assumed; }) ||
                  !record.rank;
  return v;
}

ScreenResult exceptional_set_screen(const CurveQ& curve, u64 p, const CurveArithRecord& record,
                                    const VerdictOptions& options) {
  ScreenResult r;
  if (!record.rank || *record.rank != 0 || record.torsion_order == 0) {
    r.note = "not applicable: needs a rank 0 record with torsion data";
    return r;
  }
  require_odd_prime(p);
  r.applicable = true;

  bool p_divides_n = record.conductor ? *record.conductor % p == 0 : divides_delta(curve, p);
  if (p <= 5 || p_divides_n)
    r.conditions.push_back({"small_or_bad", ScreenStatus::holds, p <= 5 ? "p <= 5" : "p divides the conductor"});
  else
    r.conditions.push_back({"small_or_bad", ScreenStatus::excludes, "p > 5 and p does not divide N"});

  if (auto w = irreducibility_certificate(curve, p, options.irreducibility_bound, options.count))
    r.conditions.push_back({"reducible", ScreenStatus::excludes, "E[p] irreducible, witness l = " + std::to_string(w->ell)});
  else
    r.conditions.push_back({"reducible", ScreenStatus::unknown, "no irreducibility witness"});

  if (auto s = record.sha_valuation(p))
    r.conditions.push_back({"p_divides_sha", *s > 0 ? ScreenStatus::holds : ScreenStatus::excludes,
                            "v_p(#Sha) = " + std::to_string(*s)});
  else
    r.conditions.push_back({"p_divides_sha", ScreenStatus::unknown, "Sha not in record"});

  u64 t = record.torsion_order;
  while (t % p == 0) t /= p;
  r.conditions.push_back({"torsion_p_power", t == 1 ? ScreenStatus::holds : ScreenStatus::excludes,
                          "torsion order " + std::to_string(record.torsion_order) +
                              (t == 1 ? " is a power of p" : " is not a power of p")});

  r.excluded = std::any_of(r.conditions.begin(), r.conditions.end(),
                           [](const ScreenCondition& c) { return c.status == ScreenStatus::excludes; });
  r.note = r.excluded ? "p is not exceptional" : "p may be exceptional";
  return r;
}

bool StabilityCertificate::all_asserted() const {
  return !conclusions.empty() &&
         std::all_of(conclusions.begin(), conclusions.end(), [](const Conclusion& c) { return c.asserted; });
}

bool StabilityCertificate::any_asserted() const {
  return std::any_of(conclusions.begin(), conclusions.end(), [](const Conclusion& c) { return c.asserted; });
}

namespace {

StabilityCertificate skeleton(const std::string& kind, const CurveQ& curve, u64 p, unsigned n,
                              std::span<const u64> sigma, const CurveArithRecord& record) {
  StabilityCertificate c;
  c.kind = kind;
  c.label = record.label;
  c.a = curve.a();
  c.b = curve.b();
  c.p = p;
  c.n = n;
  c.sigma.assign(sigma.begin(), sigma.end());
  return c;
}

void fill_prime_evidence(StabilityCertificate& c, const CurveQ& curve, const CountOptions& options) {
  for (u64 ell : c.chosen_primes)
    c.prime_evidence.push_back({ell, reduced_count(curve, ell, options), ramification_index(c.character, ell)});
}

// Shared hypothesis checks on the built character.
void common_checks(StabilityCertificate& c, const CurveQ& curve, const CountOptions& options) {
  const auto ramified = ramified_primes(c.character);
  bool within = std::all_of(ramified.begin(), ramified.end(),
                            [&](u64 l) { return contains(c.chosen_primes, l); });
  c.hypotheses.push_back({"ramified_within_chosen", within, "ramified {" + join(ramified) + "}"});

  bool split = true;
  std::ostringstream sp;
  for (u64 q : c.sigma) {
    const u64 v = frobenius_image(c.character, q);
    sp << "chi(" << q << ")=" << v << " ";
    if (v) split = false;
  }
  c.hypotheses.push_back({"sigma_split", split, c.sigma.empty() ? "empty split set" : sp.str()});

  const u64 ord = character_order(c.character);
  c.hypotheses.push_back({"exact_order", ord == c.character.order_modulus(),
                          "order " + std::to_string(ord) + " of " + std::to_string(c.character.order_modulus())});

  const bool p_in_m = contains(c.character.moduli, c.p);
  c.hypotheses.push_back({"p_unramified_in_L", !p_in_m,
                          p_in_m ? "p divides m" : "p does not divide m, so L meets Q_infinity only in Q"});
  (void)curve;
  (void)options;
}

void fill_kida(StabilityCertificate& c, const CurveQ& curve, const CurveArithRecord& record,
               const CountOptions& options) {
  auto k = kida_input_from_extension(curve, &record, c.character, record.rank.value_or(0), options);
  c.kida = k.input;
  c.kida_gaps = k.gaps;
  c.kida_lambda_value = k.gaps.empty() ? kida_lambda(k.input) : 0;
}

bool hypotheses_pass(const StabilityCertificate& c, std::string_view skip = {}) {
  return std::all_of(c.hypotheses.begin(), c.hypotheses.end(),
                     [&](const Check& h) { return h.pass || h.name == skip; });
}

}  // namespace

StabilityCertificate certify_stability(const CurveQ& curve, u64 p, unsigned n, std::span<const u64> sigma,
                                       const CurveArithRecord& record, const CertifyOptions& options) {
  require_odd_prime(p);
  if (n < 1) throw InputError("n must be >= 1");
  validate_sigma(sigma);
  const auto& count = options.verdict.count;
  StabilityCertificate c = skeleton("stability", curve, p, n, sigma, record);
  c.verdict = check_pe_membership(curve, p, record, options.verdict);
  c.assumption_flags = c.verdict.assumptions;

  SelectionStats stats{options.search_lo, options.prime_budget, 0, 0, sigma.size() + 1};
  const u64 pn = checked_pow(p, n);
  const u64 first = options.search_lo <= pn + 1 ? pn + 1 : options.search_lo + (pn - (options.search_lo - 1) % pn) % pn;
  for (u64 ell = first; ell <= options.prime_budget && c.chosen_primes.size() < stats.needed; ell += pn) {
    if (!is_prime(ell)) continue;
    ++stats.congruence_candidates;
    if (divides_delta(curve, ell) || ell == p || reduced_count(curve, ell, count) % p == 0) continue;
    ++stats.qualifying;
    if (!contains(sigma, ell)) c.chosen_primes.push_back(ell);
  }
  if (c.chosen_primes.size() < stats.needed) {
    std::ostringstream os;
    os << "S_" << n << " exhausted in [" << stats.lo << ", " << stats.hi << "]: found " << c.chosen_primes.size()
       << " usable of " << stats.needed << " needed (" << stats.congruence_candidates << " primes = 1 mod " << pn
       << ", " << stats.qualifying << " qualifying)";
    throw SelectionExhausted(os.str(), stats);
  }

  c.character = build_split_extension(sigma, c.chosen_primes, p, n);
  fill_prime_evidence(c, curve, count);

  c.hypotheses.push_back({"pe_membership", c.verdict.member,
                          c.verdict.member ? (c.verdict.conditional ? "member, conditional" : "member")
                                           : "a membership condition fails"});
  const bool rank0 = !record.rank || *record.rank == 0;
  c.hypotheses.push_back({"rank_zero", rank0, record.rank ? "rank " + std::to_string(*record.rank) : "rank assumed 0"});
  common_checks(c, curve, count);

  {
    bool disjoint = true;
    std::ostringstream os;
    for (u64 ell : ramified_primes(c.character)) {
      if (divides_delta(curve, ell)) {
        disjoint = false;
        os << ell << " bad ";
        continue;
      }
      const u64 np = reduced_count(curve, ell, count);
      os << "#E~(F_" << ell << ")=" << np << " ";
      if (np % p == 0) disjoint = false;
    }
    c.hypotheses.push_back({"ramified_disjoint_from_Q1_Q2", disjoint, os.str()});
  }
  c.hypotheses.push_back({"p_at_least_11", p >= 11, "needed for E(L) = E(Q) only"});

  fill_kida(c, curve, record, count);

  const bool core = hypotheses_pass(c, "p_at_least_11");
  c.conclusions.push_back({"rank_E_L_zero", core, core ? "" : "withheld: a hypothesis fails"});
  c.conclusions.push_back({"sha_E_L_p_trivial", core, core ? "" : "withheld: a hypothesis fails"});
  const bool mw = core && p >= 11;
  c.conclusions.push_back({"mordell_weil_stable", mw, mw ? "" : (core ? "withheld: p < 11" : "withheld: a hypothesis fails")});
  return c;
}

StabilityCertificate selmer_growth_certificate(const CurveQ& curve, u64 p, unsigned n, std::span<const u64> sigma,
                                               const CurveArithRecord& record, const CertifyOptions& options) {
  require_odd_prime(p);
  if (n < 1) throw InputError("n must be >= 1");
  validate_sigma(sigma);
  const auto& count = options.verdict.count;
  StabilityCertificate c = skeleton("selmer_growth", curve, p, n, sigma, record);
  if (record.rank && *record.rank > 0) {
    c.kind = "not_applicable";
    c.conclusions.push_back({"rank_or_sha_growth", false, "positive rank: use the trichotomy report"});
    return c;
  }
  c.verdict = check_pe_membership(curve, p, record, options.verdict);
  c.assumption_flags = c.verdict.assumptions;

  const u64 pn = checked_pow(p, n);
  std::vector<u64> t_primes, pool;
  SelectionStats stats{options.search_lo, options.prime_budget, 0, 0, sigma.size() + 1};
  u64 first = options.search_lo <= pn + 1 ? pn + 1 : options.search_lo + (pn - (options.search_lo - 1) % pn) % pn;
  for (u64 ell = first; ell <= options.prime_budget; ell += pn) {
    if (!is_prime(ell)) continue;
    ++stats.congruence_candidates;
    if (divides_delta(curve, ell) || contains(sigma, ell)) continue;
    pool.push_back(ell);
    if (reduced_count(curve, ell, count) % p == 0) t_primes.push_back(ell);
  }
  stats.qualifying = t_primes.size();
  bool found = false;
  // The partners of the T prime are a sliding window over the pool; a
  // window fails when the split conditions force the T exponent to vanish.
  constexpr std::size_t kWindows = 64;
  for (u64 lt : t_primes) {
    for (std::size_t start = 0; start < kWindows && !found; ++start) {
      std::vector<u64> chosen{lt};
      for (std::size_t i = start; i < pool.size() && chosen.size() < stats.needed; ++i)
        if (pool[i] != lt) chosen.push_back(pool[i]);
      if (chosen.size() < stats.needed) break;
      std::sort(chosen.begin(), chosen.end());
      auto chi = build_split_extension(sigma, chosen, p, n);
      if (ramification_index(chi, lt) > 1) {
        c.chosen_primes = chosen;
        c.character = std::move(chi);
        found = true;
      }
    }
    if (found) break;
  }
  if (!found) {
    std::ostringstream os;
    os << "T_" << n << " exhausted in [" << stats.lo << ", " << stats.hi << "]: " << stats.qualifying
       << " candidates, none ramified with sigma split";
    throw SelectionExhausted(os.str(), stats);
  }
  fill_prime_evidence(c, curve, count);

  c.hypotheses.push_back({"pe_membership", c.verdict.member,
                          c.verdict.member ? (c.verdict.conditional ? "member, conditional" : "member")
                                           : "a membership condition fails"});
  c.hypotheses.push_back({"rank_zero", true, record.rank ? "rank 0" : "rank assumed 0"});
  common_checks(c, curve, count);

  const auto ramified = ramified_primes(c.character);
  {
    bool good = true, meets_t = false;
    std::ostringstream os;
    for (u64 ell : ramified) {
      if (divides_delta(curve, ell)) {
        good = false;
        os << ell << " bad ";
        continue;
      }
      const u64 np = reduced_count(curve, ell, count);
      os << "#E~(F_" << ell << ")=" << np << " ";
      if (np % p == 0) meets_t = true;
    }
    c.hypotheses.push_back({"ramified_good_reduction", good, os.str()});
    c.hypotheses.push_back({"ramified_meets_T", meets_t, "some ramified l has p | #E~(F_l)"});
  }
  c.hypotheses.push_back({"p_at_least_5", p >= 5, "Tamagawa base change needs p >= 5"});
  {
    bool ok = true;
    std::ostringstream os;
    for (u64 ell : record.bad_primes()) {
      if (ell == p) continue;
      const auto cval = record.tamagawa_at(ell);
      const u64 v = cval ? static_cast<u64>(valuation(static_cast<u128>(*cval), p)) : 0;
      const auto verdict = tamagawa_base_change_check(v, contains(ramified, ell), record.reduction_at(ell), p);
      os << ell << ":" << to_string(verdict) << (cval ? " " : "(c assumed) ");
      if (verdict != BaseChange::certified) ok = false;
    }
    c.hypotheses.push_back({"tamagawa_base_change", ok, os.str()});
  }

  fill_kida(c, curve, record, count);

  const bool all = hypotheses_pass(c);
  c.conclusions.push_back({"sel_Q_trivial", c.verdict.member, c.verdict.member ? "from membership" : "not established"});
  c.conclusions.push_back({"rank_or_sha_growth", all, all ? "rank E(L) > 0 or Sha(E/L)[p^infty] != 0"
                                                          : "withheld: a hypothesis fails"});
  return c;
}

TrichotomyReport positive_rank_trichotomy(const CurveArithRecord& record_q, u64 p, const PartialRecordL& record_l) {
  TrichotomyReport r;
  if (!record_q.rank || *record_q.rank == 0) {
    r.note = "not applicable: needs positive rank over Q";
    return r;
  }
  if (record_l.degree == 0) {
    r.note = "not applicable: degree of L missing";
    return r;
  }
  r.applicable = true;
  const u64 rq = *record_q.rank;
  if (record_l.rank) r.rank_growth = *record_l.rank >= record_l.degree * rq ? Assertion::confirmed : Assertion::refuted;

  const auto reg_q = record_q.regulator_valuation.count(p) ? std::optional<i64>(record_q.regulator_valuation.at(p))
                                                           : std::nullopt;
  if ((reg_q && *reg_q != 0) || (record_l.regulator_valuation && *record_l.regulator_valuation == 0))
    r.regulator_drop = Assertion::refuted;
  else if (reg_q && record_l.regulator_valuation)
    r.regulator_drop = Assertion::confirmed;

  const auto sha_q = record_q.sha_valuation(p);
  if ((sha_q && *sha_q != 0) || (record_l.sha_valuation && *record_l.sha_valuation == 0))
    r.sha_growth = Assertion::refuted;
  else if (sha_q && record_l.sha_valuation)
    r.sha_growth = Assertion::confirmed;

  r.inconsistent = r.rank_growth == Assertion::refuted && r.regulator_drop == Assertion::refuted &&
                   r.sha_growth == Assertion::refuted;
  if (r.inconsistent) r.note = "data inconsistency: all three assertions refuted";
  return r;
}

}  // namespace ecstab
