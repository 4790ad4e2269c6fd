#include "ecstab/record.hpp"

#include <fstream>
#include <algorithm>
#include <istream>

namespace ecstab {

using nlohmann::json;

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::ingested: return "ingested";
    case Provenance::assumed: return "assumed";
    case Provenance::computed: return "computed";
  }
  return "assumed";
}

std::optional<u64> CurveArithRecord::sha_valuation(u64 p) const {
  if (auto it = sha_p_valuation.find(p); it != sha_p_valuation.end()) return it->second;
  if (sha_order) return static_cast<u64>(valuation(static_cast<u128>(*sha_order), p));
  return std::nullopt;
}

std::optional<i64> CurveArithRecord::regulator_val(u64 p) const {
  if (rank && *rank == 0) return 0;
  if (auto it = regulator_valuation.find(p); it != regulator_valuation.end()) return it->second;
  return std::nullopt;
}

std::optional<u64> CurveArithRecord::tamagawa_at(u64 ell) const {
  if (auto it = tamagawa.find(ell); it != tamagawa.end()) return it->second;
  return std::nullopt;
}

ReductionType CurveArithRecord::reduction_at(u64 ell) const {
  if (auto it = reduction.find(ell); it != reduction.end()) return it->second;
  if (conductor && *conductor % ell != 0) return ReductionType::good;
  if (!curve) return ReductionType::unsupported;
  return reduction_type(*curve, ell);
}

std::vector<u64> CurveArithRecord::bad_primes() const {
  if (conductor) return prime_divisors(static_cast<i128>(*conductor));
  if (curve) return prime_divisors(curve->discriminant());
  return {};
}

bool CurveArithRecord::tamagawa_complete() const {
  for (u64 l : bad_primes())
    if (!tamagawa.count(l)) return false;
  return true;
}

const CurveArithRecord* IngestReport::find(std::string_view label) const {
  for (const auto& r : records)
    if (r.label == label) return &r;
  return nullptr;
}

namespace {

u64 as_prime_key(const std::string& key, const char* field) {
  std::size_t used = 0;
  u64 v = 0;
  try {
    v = std::stoull(key, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != key.size() || !is_prime(v)) throw InputError(std::string(field) + ": key '" + key + "' is not a prime");
  return v;
}

u64 as_u64(const json& j, const char* field) {
  if (!j.is_number_integer() || j.get<i64>() < 0) throw InputError(std::string(field) + " must be a nonnegative integer");
  return j.get<u64>();
}

}  // namespace

CurveArithRecord parse_record(const json& j) {
  if (!j.is_object()) throw InputError("record is not a JSON object");
  CurveArithRecord r;
  if (!j.contains("label") || !j["label"].is_string()) throw InputError("label missing");
  r.label = j["label"].get<std::string>();
  if (!j.contains("a") || !j.contains("b") || !j["a"].is_number_integer() || !j["b"].is_number_integer())
    throw InputError("integer coefficients a, b required");
  r.curve = CurveQ::make(j["a"].get<i64>(), j["b"].get<i64>());
  if (!r.curve->minimal()) throw InputError("model is not minimal: a twelfth power divides gcd(a^3, b^2)");
  if (!j.contains("rank")) throw InputError("rank missing");
  r.rank = as_u64(j["rank"], "rank");
  if (!j.contains("torsion_order")) throw InputError("torsion_order missing");
  r.torsion_order = as_u64(j["torsion_order"], "torsion_order");
  if (r.torsion_order == 0) throw InputError("torsion_order must be positive");
  r.provenance["rank"] = Provenance::ingested;
  r.provenance["torsion_order"] = Provenance::ingested;

  if (j.contains("conductor")) {
    r.conductor = as_u64(j["conductor"], "conductor");
    if (*r.conductor == 0) throw InputError("conductor must be positive");
    for (u64 l : r.bad_primes())
      if (r.curve->discriminant() % static_cast<i128>(l) != 0)
        throw InputError("conductor prime " + std::to_string(l) + " does not divide the model discriminant");
    r.provenance["conductor"] = Provenance::ingested;
  }
  if (j.contains("sha_order")) {
    r.sha_order = as_u64(j["sha_order"], "sha_order");
    if (*r.sha_order == 0) throw InputError("sha_order must be positive");
    r.provenance["sha"] = Provenance::ingested;
  }
  if (j.contains("sha_p_valuation")) {
    for (auto& [k, v] : j["sha_p_valuation"].items())
      r.sha_p_valuation[as_prime_key(k, "sha_p_valuation")] = as_u64(v, "sha_p_valuation");
    r.provenance["sha"] = Provenance::ingested;
  }
  if (j.contains("tamagawa")) {
    if (!j["tamagawa"].is_object()) throw InputError("tamagawa must be an object");
    for (auto& [k, v] : j["tamagawa"].items()) {
      const u64 c = as_u64(v, "tamagawa");
      if (c == 0) throw InputError("tamagawa numbers are positive");
      r.tamagawa[as_prime_key(k, "tamagawa")] = c;
    }
    r.provenance["tamagawa"] = Provenance::ingested;
  }
  if (j.contains("reg_valuation")) {
    for (auto& [k, v] : j["reg_valuation"].items()) {
      if (!v.is_number_integer()) throw InputError("reg_valuation entries must be integers");
      r.regulator_valuation[as_prime_key(k, "reg_valuation")] = v.get<i64>();
    }
    r.provenance["reg_valuation"] = Provenance::ingested;
  }
  if (j.contains("reduction")) {
    for (auto& [k, v] : j["reduction"].items()) {
      auto t = v.is_string() ? parse_reduction_type(v.get<std::string>()) : std::nullopt;
      if (!t) throw InputError("unknown reduction type for " + k);
      r.reduction[as_prime_key(k, "reduction")] = *t;
    }
  }
  if (j.contains("source") && j["source"].is_string()) r.source = j["source"].get<std::string>();
  return r;
}

json to_json(const CurveArithRecord& r) {
  json j;
  j["label"] = r.label;
  if (r.curve) {
    j["a"] = r.curve->a();
    j["b"] = r.curve->b();
  }
  if (r.conductor) j["conductor"] = *r.conductor;
  if (r.rank) j["rank"] = *r.rank;
  j["torsion_order"] = r.torsion_order;
  if (r.sha_order) j["sha_order"] = *r.sha_order;
  auto keyed = [](const auto& m) {
    json o = json::object();
    for (auto& [k, v] : m) o[std::to_string(k)] = v;
    return o;
  };
  if (!r.sha_p_valuation.empty()) j["sha_p_valuation"] = keyed(r.sha_p_valuation);
  j["tamagawa"] = keyed(r.tamagawa);
  if (!r.regulator_valuation.empty()) j["reg_valuation"] = keyed(r.regulator_valuation);
  if (!r.reduction.empty()) {
    json o = json::object();
    for (auto& [k, v] : r.reduction) o[std::to_string(k)] = std::string(to_string(v));
    j["reduction"] = o;
  }
  j["source"] = r.source;
  return j;
}

IngestReport ingest_records(std::istream& in) {
  IngestReport rep;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      CurveArithRecord r = parse_record(json::parse(line));
      auto it = std::find_if(rep.records.begin(), rep.records.end(),
                             [&](const CurveArithRecord& x) { return x.label == r.label; });
      if (it != rep.records.end()) {
        rep.warnings.push_back("line " + std::to_string(lineno) + ": duplicate label " + r.label + " replaces earlier entry");
        *it = std::move(r);
      } else {
        rep.records.push_back(std::move(r));
      }
    } catch (const json::exception& e) {
      rep.errors.push_back("line " + std::to_string(lineno) + ": malformed JSON: " + e.what());
    } catch (const InputError& e) {
      rep.errors.push_back("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return rep;
}

IngestReport ingest_records(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InputError("cannot open " + path);
  return ingest_records(f);
}

}  // namespace ecstab
