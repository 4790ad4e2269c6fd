#pragma once

// Wire formats: characters and certificates as JSON, sweeps as CSV and SVG.

#include <iosfwd>
#include <string>
#include <vector>

#include "ecstab/density.hpp"
#include "ecstab/stability.hpp"
#include "json.hpp"

namespace ecstab {

nlohmann::json to_json(const CyclicCharacter& chi);
/// Throws InputError on missing or mistyped fields.
CyclicCharacter character_from_json(const nlohmann::json& j);

/// Certificate JSON including its digest field.
nlohmann::json to_json(const StabilityCertificate& c);
StabilityCertificate certificate_from_json(const nlohmann::json& j);

/// FNV-1a 64 over the compact dump of the object without "digest".
std::string certificate_digest(const nlohmann::json& j);

struct VerifyReport {
  bool ok = false;
  std::vector<Check> items;
};

/// Recomputes everything the certificate claims that does not need the
/// dataset: digest, character rebuild, point counts at the chosen primes,
/// splitting of sigma, and consistency of asserted conclusions.
VerifyReport verify_certificate(const nlohmann::json& j, const CountOptions& options = {});

void write_sweep_csv(std::ostream& out, const SweepResult& r, bool header = true);
void write_sweep_svg(std::ostream& out, const SweepResult& r, const std::string& title);

}  // namespace ecstab
