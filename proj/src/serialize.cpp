#include "ecstab/serialize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace ecstab {

using nlohmann::json;

namespace {

template <class T>
T field(const json& j, const char* key) {
  if (!j.contains(key)) throw InputError(std::string("missing field ") + key);
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw InputError(std::string("bad type for field ") + key);
  }
}

Status parse_status(const std::string& s) {
  for (Status st : {Status::pass, Status::fail, Status::assumed})
    if (to_string(st) == s) return st;
  throw InputError("unknown status " + s);
}

}  // namespace

json to_json(const CyclicCharacter& chi) {
  return json{{"p", chi.p}, {"n", chi.n}, {"moduli", chi.moduli}, {"generators", chi.generators},
              {"exponents", chi.exponents}};
}

CyclicCharacter character_from_json(const json& j) {
  if (!j.is_object()) throw InputError("character must be an object");
  CyclicCharacter chi;
  chi.p = field<u64>(j, "p");
  chi.n = field<unsigned>(j, "n");
  chi.moduli = field<std::vector<u64>>(j, "moduli");
  chi.generators = field<std::vector<u64>>(j, "generators");
  chi.exponents = field<std::vector<u64>>(j, "exponents");
  return chi;
}

std::string certificate_digest(const json& j) {
  json body = j;
  body.erase("digest");
  const std::string s = body.dump();
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a(s.data(), s.size())));
  return buf;
}

json to_json(const StabilityCertificate& c) {
  json j;
  j["format"] = "ecstab-certificate/1";
  j["kind"] = c.kind;
  j["curve"] = {{"label", c.label}, {"a", c.a}, {"b", c.b}};
  j["p"] = c.p;
  j["n"] = c.n;
  j["sigma"] = c.sigma;
  j["chosen_primes"] = c.chosen_primes;
  j["character"] = to_json(c.character);
  json ev = json::array();
  for (const auto& e : c.prime_evidence)
    ev.push_back({{"ell", e.ell}, {"point_count", e.point_count}, {"ramification", e.ramification}});
  j["prime_evidence"] = ev;
  json hyp = json::array();
  for (const auto& h : c.hypotheses) hyp.push_back({{"name", h.name}, {"pass", h.pass}, {"evidence", h.evidence}});
  j["hypotheses"] = hyp;
  json reasons = json::array();
  for (const auto& r : c.verdict.reasons)
    reasons.push_back({{"name", r.name}, {"status", std::string(to_string(r.status))}, {"evidence", r.evidence}});
  j["verdict"] = {{"member", c.verdict.member},
                  {"conditional", c.verdict.conditional},
                  {"reasons", reasons},
                  {"assumptions", c.verdict.assumptions}};
  json concl = json::array();
  for (const auto& x : c.conclusions) concl.push_back({{"name", x.name}, {"asserted", x.asserted}, {"note", x.note}});
  j["conclusions"] = concl;
  j["assumption_flags"] = c.assumption_flags;
  j["kida"] = {{"degree", c.kida.degree}, {"lambda_base", c.kida.lambda_base}, {"P1_e", c.kida.p1_e},
               {"P2_e", c.kida.p2_e},     {"lambda_L", c.kida_lambda_value},   {"gaps", c.kida_gaps}};
  j["digest"] = certificate_digest(j);
  return j;
}

StabilityCertificate certificate_from_json(const json& j) {
  if (!j.is_object()) throw InputError("certificate must be an object");
  StabilityCertificate c;
  c.kind = field<std::string>(j, "kind");
  const json& curve = j.at("curve");
  c.label = field<std::string>(curve, "label");
  c.a = field<i64>(curve, "a");
  c.b = field<i64>(curve, "b");
  c.p = field<u64>(j, "p");
  c.n = field<unsigned>(j, "n");
  c.sigma = field<std::vector<u64>>(j, "sigma");
  c.chosen_primes = field<std::vector<u64>>(j, "chosen_primes");
  c.character = character_from_json(j.at("character"));
  for (const auto& e : j.at("prime_evidence"))
    c.prime_evidence.push_back({field<u64>(e, "ell"), field<u64>(e, "point_count"), field<u64>(e, "ramification")});
  for (const auto& h : j.at("hypotheses"))
    c.hypotheses.push_back({field<std::string>(h, "name"), field<bool>(h, "pass"), field<std::string>(h, "evidence")});
  const json& v = j.at("verdict");
  c.verdict.member = field<bool>(v, "member");
  c.verdict.conditional = field<bool>(v, "conditional");
  for (const auto& r : v.at("reasons"))
    c.verdict.reasons.push_back(
        {field<std::string>(r, "name"), parse_status(field<std::string>(r, "status")), field<std::string>(r, "evidence")});
  c.verdict.assumptions = field<std::vector<std::string>>(v, "assumptions");
  for (const auto& x : j.at("conclusions"))
    c.conclusions.push_back({field<std::string>(x, "name"), field<bool>(x, "asserted"), field<std::string>(x, "note")});
  c.assumption_flags = field<std::vector<std::string>>(j, "assumption_flags");
  const json& k = j.at("kida");
  c.kida.degree = field<u64>(k, "degree");
  c.kida.lambda_base = field<u64>(k, "lambda_base");
  c.kida.p1_e = field<std::vector<u64>>(k, "P1_e");
  c.kida.p2_e = field<std::vector<u64>>(k, "P2_e");
  c.kida_lambda_value = field<u64>(k, "lambda_L");
  c.kida_gaps = field<std::vector<std::string>>(k, "gaps");
  c.digest = field<std::string>(j, "digest");
  return c;
}

VerifyReport verify_certificate(const json& j, const CountOptions& options) {
  VerifyReport rep;
  auto add = [&](std::string name, bool pass, std::string ev) { rep.items.push_back({std::move(name), pass, std::move(ev)}); };

  const bool digest_ok = j.is_object() && j.contains("digest") && j["digest"].is_string() &&
                         j["digest"].get<std::string>() == certificate_digest(j);
  add("digest", digest_ok, digest_ok ? "matches" : "digest mismatch");

  StabilityCertificate c;
  try {
    c = certificate_from_json(j);
  } catch (const std::exception& e) {
    add("parse", false, e.what());
    return rep;
  }
  std::optional<CurveQ> curve;
  try {
    curve = CurveQ::make(c.a, c.b);
  } catch (const InputError& e) {
    add("curve", false, e.what());
    return rep;
  }
  if (c.kind == "not_applicable") {
    const bool none = !c.any_asserted();
    add("no_conclusions", none, "not-applicable certificate");
    rep.ok = digest_ok && none;
    return rep;
  }

  const bool header = c.character.p == c.p && c.character.n == c.n && c.character.moduli == c.chosen_primes &&
                      c.p >= 3 && is_prime(c.p) && c.n >= 1;
  add("header_consistent", header, "character p, n and moduli match the certificate");
  if (!header) return rep;
  const u64 pn = c.character.order_modulus();

  bool congruent = true;
  for (u64 l : c.chosen_primes)
    if (!is_prime(l) || l % pn != 1) congruent = false;
  add("chosen_primes_congruent", congruent, "each chosen prime is = 1 mod " + std::to_string(pn));

  bool rebuilt = false;
  try {
    rebuilt = build_split_extension(c.sigma, c.chosen_primes, c.p, c.n) == c.character;
  } catch (const std::exception& e) {
    add("character_rebuild", false, e.what());
  }
  if (rep.items.back().name != "character_rebuild") add("character_rebuild", rebuilt, "deterministic construction reproduced");

  for (const auto& item : verify_extension(c.character, c.sigma, *curve, options)) {
    // Q1/Q2 disjointness is a hypothesis only for stability certificates.
    if (item.name == "ramified_disjoint_from_Q1_Q2" && c.kind != "stability") continue;
    add("extension_" + item.name, item.pass, item.evidence);
  }

  bool counts = c.prime_evidence.size() == c.chosen_primes.size();
  std::string ev;
  for (std::size_t i = 0; counts && i < c.prime_evidence.size(); ++i) {
    const auto& e = c.prime_evidence[i];
    if (e.ell != c.chosen_primes[i]) {
      counts = false;
      break;
    }
    auto red = reduce_mod(*curve, e.ell);
    if (std::holds_alternative<BadReduction>(red)) {
      counts = false;
      ev += std::to_string(e.ell) + " bad; ";
      continue;
    }
    const u64 n = count_points(std::get<CurveFp>(red), options);
    ev += "#E~(F_" + std::to_string(e.ell) + ")=" + std::to_string(n) + "; ";
    if (n != e.point_count || e.ramification != ramification_index(c.character, e.ell)) counts = false;
    if (c.kind == "stability" && n % c.p == 0) counts = false;
  }
  add("point_counts_recomputed", counts, ev);

  // Asserted conclusions need their hypotheses.
  bool consistent = true;
  for (const auto& concl : c.conclusions) {
    if (!concl.asserted) continue;
    for (const auto& h : c.hypotheses) {
      if (h.pass) continue;
      if (h.name == "p_at_least_11" && concl.name != "mordell_weil_stable") continue;
      if (concl.name == "sel_Q_trivial") continue;
      consistent = false;
    }
    if (concl.name == "mordell_weil_stable" && c.p < 11) consistent = false;
    if (concl.name == "sel_Q_trivial" && !c.verdict.member) consistent = false;
  }
  for (const auto& h : c.hypotheses)
    if (h.name == "pe_membership" && h.pass != c.verdict.member) consistent = false;
  add("conclusions_supported", consistent, "asserted conclusions rest on passing hypotheses");

  rep.ok = std::all_of(rep.items.begin(), rep.items.end(), [](const Check& x) { return x.pass; });
  return rep;
}

void write_sweep_csv(std::ostream& out, const SweepResult& r, bool header) {
  if (header) out << "param,x,hits,total,ratio,reference,rel_error\n";
  char buf[128];
  for (const auto& pt : r.series) {
    std::snprintf(buf, sizeof(buf), "%.10g,%.10g,%.6g", pt.ratio, pt.reference, pt.rel_error);
    out << r.param << ',' << pt.x << ',' << pt.hits << ',' << pt.total << ',' << buf << '\n';
  }
}

void write_sweep_svg(std::ostream& out, const SweepResult& r, const std::string& title) {
  const double w = 640, h = 400, m = 50;
  double lo = 1e300, hi = -1e300;
  for (const auto& pt : r.series) {
    lo = std::min({lo, pt.ratio, pt.reference});
    hi = std::max({hi, pt.ratio, pt.reference});
  }
  if (r.series.empty()) lo = 0, hi = 1;
  if (hi - lo < 1e-12) hi = lo + 1e-3, lo -= 1e-3;
  const double lx0 = r.series.empty() ? 0 : std::log10(static_cast<double>(std::max<u64>(r.series.front().x, 1)));
  double lx1 = r.series.empty() ? 1 : std::log10(static_cast<double>(std::max<u64>(r.series.back().x, 1)));
  if (lx1 - lx0 < 1e-9) lx1 = lx0 + 1;
  auto X = [&](u64 x) { return m + (std::log10(static_cast<double>(std::max<u64>(x, 1))) - lx0) / (lx1 - lx0) * (w - 2 * m); };
  auto Y = [&](double y) { return h - m - (y - lo) / (hi - lo) * (h - 2 * m); };
  char buf[160];
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << m << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n";
  out << "<line x1=\"" << m << "\" y1=\"" << h - m << "\" x2=\"" << w - m << "\" y2=\"" << h - m << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << m << "\" y1=\"" << m << "\" x2=\"" << m << "\" y2=\"" << h - m << "\" stroke=\"black\"/>\n";
  std::snprintf(buf, sizeof(buf), "<text x=\"4\" y=\"%.1f\" font-size=\"10\">%.4g</text>\n", Y(hi), hi);
  out << buf;
  std::snprintf(buf, sizeof(buf), "<text x=\"4\" y=\"%.1f\" font-size=\"10\">%.4g</text>\n", Y(lo), lo);
  out << buf;
  std::string ratio, ref;
  for (const auto& pt : r.series) {
    std::snprintf(buf, sizeof(buf), "%.1f,%.1f ", X(pt.x), Y(pt.ratio));
    ratio += buf;
    std::snprintf(buf, sizeof(buf), "%.1f,%.1f ", X(pt.x), Y(pt.reference));
    ref += buf;
  }
  out << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"" << ratio << "\"/>\n";
  out << "<polyline fill=\"none\" stroke=\"#d62728\" stroke-dasharray=\"6,4\" points=\"" << ref << "\"/>\n";
  for (const auto& pt : r.series) {
    std::snprintf(buf, sizeof(buf), "<circle cx=\"%.1f\" cy=\"%.1f\" r=\"3\" fill=\"#1f77b4\"/>\n", X(pt.x), Y(pt.ratio));
    out << buf;
  }
  out << "<text x=\"" << w - m - 150 << "\" y=\"" << m << "\" font-size=\"11\" fill=\"#1f77b4\">empirical ratio</text>\n";
  out << "<text x=\"" << w - m - 150 << "\" y=\"" << m + 14 << "\" font-size=\"11\" fill=\"#d62728\">reference</text>\n";
  out << "</svg>\n";
}

}  // namespace ecstab
