#pragma once

// Stability criteria: bad/torsion prime sets, admissible congruence primes,
// membership verdicts and the two certificate builders.

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ecstab/extension.hpp"
#include "ecstab/iwasawa.hpp"
#include "ecstab/record.hpp"

namespace ecstab {

struct Q1Q2 {
  /// Bad primes other than p. Complete.
  std::vector<u64> q1;
  /// Good primes l != p, l <= bound, with p | #E~(F_l).
  std::vector<u64> q2;
  u64 bound = 0;
  /// Q2 is infinite; the list is always a truncation.
  bool q2_truncated = true;
};

/// With a record carrying a conductor, Q1 uses it (the short model can be
/// non-minimal at 2 and 3); otherwise the model discriminant.
Q1Q2 compute_q1_q2(const CurveQ& curve, u64 p, u64 bound, const CurveArithRecord* record = nullptr,
                   const CountOptions& options = {});

enum class PrimeMode { S, T };

/// Primes l in [lo, hi] with l = 1 mod p^n, l not dividing p * Delta, and
/// p not dividing (S) or dividing (T) #E~(F_l). Only the congruence class is
/// point counted.
std::vector<u64> enumerate_congruence_primes(const CurveQ& curve, u64 p, unsigned n, u64 lo, u64 hi, PrimeMode mode,
                                             const CountOptions& options = {});
inline std::vector<u64> enumerate_congruence_primes(const CurveQ& curve, u64 p, unsigned n, u64 x, PrimeMode mode,
                                                    const CountOptions& options = {}) {
  return enumerate_congruence_primes(curve, p, n, 2, x, mode, options);
}

enum class Status { pass, fail, assumed };
std::string_view to_string(Status s);

struct Condition {
  std::string name;
  Status status = Status::fail;
  std::string evidence;
};

struct PEVerdict {
  /// No condition failed.
  bool member = false;
  /// Some condition rests on an assumption rather than data.
  bool conditional = false;
  std::vector<Condition> reasons;
  std::vector<std::string> assumptions;
};

struct VerdictOptions {
  u64 irreducibility_bound = 1000;
  CountOptions count;
};

PEVerdict check_pe_membership(const CurveQ& curve, u64 p, const CurveArithRecord& record,
                              const VerdictOptions& options = {});

enum class ScreenStatus { excludes, holds, unknown };

struct ScreenCondition {
  std::string name;
  ScreenStatus status = ScreenStatus::unknown;
  std::string evidence;
};

struct ScreenResult {
  bool applicable = false;
  /// p is certified to lie outside the exceptional set.
  bool excluded = false;
  std::vector<ScreenCondition> conditions;
  std::string note;
};

/// p can be exceptional only if all of: p <= 5 or p | N; E[p] not certified
/// irreducible; p | #Sha; #E(Q)_tors a power of p.
ScreenResult exceptional_set_screen(const CurveQ& curve, u64 p, const CurveArithRecord& record,
                                    const VerdictOptions& options = {});

struct Check {
  std::string name;
  bool pass = false;
  std::string evidence;
};

struct Conclusion {
  std::string name;
  bool asserted = false;
  std::string note;
};

struct PrimeEvidence {
  u64 ell = 0;
  u64 point_count = 0;
  u64 ramification = 1;
};

struct StabilityCertificate {
  std::string kind;  // "stability" or "selmer_growth"
  std::string label;
  i64 a = 0;
  i64 b = 0;
  u64 p = 0;
  unsigned n = 1;
  std::vector<u64> sigma;
  std::vector<u64> chosen_primes;
  CyclicCharacter character;
  std::vector<PrimeEvidence> prime_evidence;
  std::vector<Check> hypotheses;
  PEVerdict verdict;
  std::vector<Conclusion> conclusions;
  std::vector<std::string> assumption_flags;
  KidaInput kida;
  u64 kida_lambda_value = 0;
  std::vector<std::string> kida_gaps;
  std::string digest;

  bool all_asserted() const;
  bool any_asserted() const;
};

struct SelectionStats {
  u64 lo = 0;
  u64 hi = 0;
  u64 congruence_candidates = 0;
  u64 qualifying = 0;
  u64 needed = 0;
};

class SelectionExhausted : public std::runtime_error {
 public:
  SelectionExhausted(const std::string& what, SelectionStats s) : std::runtime_error(what), stats(s) {}
  SelectionStats stats;
};

struct CertifyOptions {
  /// Primes are drawn from [search_lo, prime_budget].
  u64 prime_budget = 100000;
  u64 search_lo = 2;
  VerdictOptions verdict;
};

/// Picks #sigma + 1 primes of S_n (smallest first, skipping sigma), builds
/// the split extension and checks the stability hypotheses. Conclusions are
/// asserted only when every hypothesis passes; the Mordell-Weil conclusion
/// additionally needs p >= 11. Throws SelectionExhausted.
StabilityCertificate certify_stability(const CurveQ& curve, u64 p, unsigned n, std::span<const u64> sigma,
                                       const CurveArithRecord& record, const CertifyOptions& options = {});

/// An extension ramified at a prime of T_n with sigma split and all
/// ramified primes of good reduction; concludes rank E(L) > 0 or
/// Sha(E/L)[p^infty] != 0. Records with positive rank yield a certificate of
/// kind "not_applicable".
StabilityCertificate selmer_growth_certificate(const CurveQ& curve, u64 p, unsigned n, std::span<const u64> sigma,
                                               const CurveArithRecord& record, const CertifyOptions& options = {});

enum class Assertion { confirmed, refuted, open };
std::string_view to_string(Assertion a);

struct PartialRecordL {
  u64 degree = 0;
  std::optional<u64> rank;
  std::optional<i64> regulator_valuation;
  std::optional<u64> sha_valuation;
};

struct TrichotomyReport {
  bool applicable = false;
  /// rank E(L) >= [L:Q] rank E(Q); regulator unit over Q but not over L;
  /// Sha(E/Q)[p^infty] = 0 and Sha(E/L)[p^infty] != 0.
  Assertion rank_growth = Assertion::open;
  Assertion regulator_drop = Assertion::open;
  Assertion sha_growth = Assertion::open;
  bool inconsistent = false;
  std::string note;
};

TrichotomyReport positive_rank_trichotomy(const CurveArithRecord& record_q, u64 p, const PartialRecordL& record_l);

}  // namespace ecstab
