#pragma once

// Arithmetic data that cannot be computed at the desk (rank, Sha, Tamagawa
// numbers, regulators) and the JSON-lines reader for it.

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ecstab/curve.hpp"
#include "json.hpp"

namespace ecstab {

enum class Provenance { ingested, assumed, computed };
std::string_view to_string(Provenance p);

struct CurveArithRecord {
  std::string label;
  std::optional<CurveQ> curve;
  std::optional<u64> conductor;
  std::optional<u64> rank;
  u64 torsion_order = 1;
  std::optional<u64> sha_order;
  /// Explicit v_p(#Sha) entries; take precedence over sha_order.
  std::map<u64, u64> sha_p_valuation;
  std::map<u64, u64> tamagawa;
  std::map<u64, i64> regulator_valuation;
  /// Reduction types supplied by the dataset (needed at 2 and 3).
  std::map<u64, ReductionType> reduction;
  std::map<std::string, Provenance> provenance;
  std::string source;

  std::optional<u64> sha_valuation(u64 p) const;
  std::optional<i64> regulator_val(u64 p) const;
  std::optional<u64> tamagawa_at(u64 ell) const;
  /// Ingested type if present, otherwise classified from the model.
  ReductionType reduction_at(u64 ell) const;
  /// Bad primes: from the conductor when known, else from the model.
  std::vector<u64> bad_primes() const;
  bool tamagawa_complete() const;
};

struct IngestReport {
  std::vector<CurveArithRecord> records;
  std::vector<std::string> errors;
  std::vector<std::string> warnings;

  const CurveArithRecord* find(std::string_view label) const;
};

/// Throws InputError with a field-level message.
CurveArithRecord parse_record(const nlohmann::json& j);
nlohmann::json to_json(const CurveArithRecord& r);

IngestReport ingest_records(std::istream& in);
/// Throws InputError if the file cannot be opened.
IngestReport ingest_records(const std::string& path);

}  // namespace ecstab
