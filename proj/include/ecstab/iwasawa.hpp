#pragma once

// Formula-level Iwasawa bookkeeping: Kida's lambda formula, the p-adic
// valuation of the truncated Euler characteristic, and the Tamagawa
// base-change predicate. chi_t is carried only through its valuation.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ecstab/extension.hpp"
#include "ecstab/record.hpp"

namespace ecstab {

struct IwasawaInvariants {
  u64 mu = 0;
  u64 lambda = 0;
};

struct KidaInput {
  u64 degree = 1;
  u64 lambda_base = 0;
  /// Ramification indices over primes of split multiplicative reduction.
  std::vector<u64> p1_e;
  /// Ramification indices over good primes carrying a point of order p.
  std::vector<u64> p2_e;
};

/// degree * lambda + sum_{P1} (e - 1) + 2 sum_{P2} (e - 1), assuming mu = 0.
/// Throws InputError if some e is zero or does not divide degree.
u64 kida_lambda(const KidaInput& input);

struct KidaContribution {
  u64 ell = 0;
  std::string kind;  // "P1", "P2", "none", "gap"
  DecompositionData decomposition;
};

struct KidaAssembly {
  KidaInput input;
  std::vector<KidaContribution> contributions;
  /// Ramified primes whose reduction type blocks the formula.
  std::vector<std::string> gaps;
};

/// Collects P1/P2 multisets for the ramified primes of chi. Each prime ell
/// contributes g copies of its e. Unramified primes contribute e - 1 = 0 and
/// are skipped.
KidaAssembly kida_input_from_extension(const CurveQ& curve, const CurveArithRecord* record, const CyclicCharacter& chi,
                                       u64 lambda_base, const CountOptions& options = {});

struct EulerComponents {
  i64 regulator = 0;
  u64 sha = 0;
  std::vector<u64> tamagawa;
  std::vector<u64> reduced_torsion;
};

/// reg + sha + sum tamagawa + 2 * sum reduced_torsion. Throws on a negative
/// regulator valuation.
u64 euler_characteristic_valuation(const EulerComponents& c);

struct EulerResult {
  u64 valuation = 0;
  EulerComponents components;
  std::vector<std::string> assumptions;
  bool conditional() const { return !assumptions.empty(); }
};

/// Valuation of chi_t over Q from a record. reduced_torsion_orders are the
/// values #E~(k_v)[p^infty] at the places above p. Missing record fields are
/// taken as trivial and listed in assumptions.
EulerResult euler_characteristic_valuation(const CurveArithRecord& record, u64 p,
                                           std::span<const u64> reduced_torsion_orders);

/// v_p(#E~(F_{p^k})) for k = p^j from a_p, by the recurrence
/// s_k = a s_{k-1} - p s_{k-2} run as a 2x2 matrix power mod p^precision.
/// The result is a lower bound when it reaches precision.
u64 reduced_torsion_valuation(i64 a_p, u64 p, unsigned j, unsigned precision = 20);

/// (mu = 0 and lambda = rank) iff chi_val = 0.
bool mulambda_consistency(const IwasawaInvariants& inv, u64 rank, u64 chi_val);

enum class BaseChange { certified, no_conclusion, not_applicable };
std::string_view to_string(BaseChange b);

/// Product of p-parts of Tamagawa numbers over places of L above ell is 1
/// when c_ell^(p)(E/Q) = 1 and, if ell ramifies, E has good reduction there.
/// p < 5 is not covered.
BaseChange tamagawa_base_change_check(u64 c_val_q, bool ramified, ReductionType reduction, u64 p);

}  // namespace ecstab
