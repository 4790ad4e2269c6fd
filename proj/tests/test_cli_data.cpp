#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "ecstab/cli.hpp"
#include "ecstab/serialize.hpp"

using namespace ecstab;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  args.insert(args.begin(), {"--records", std::string(ECSTAB_TEST_DATA) + "/curves.jsonl"});
  const int code = run_command(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  auto d = fs::temp_directory_path() / ("ecstab_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

IngestReport ingest_text(const std::string& text) {
  std::istringstream in(text);
  return ingest_records(in);
}

// Every leaf of j as a JSON pointer, skipping the digest.
void leaves(const json& j, const json::json_pointer& at, std::vector<json::json_pointer>& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it)
      if (!(at.empty() && it.key() == "digest")) leaves(it.value(), at / it.key(), out);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) leaves(j[i], at / i, out);
  } else {
    out.push_back(at);
  }
}

void perturb(json& v) {
  if (v.is_boolean()) v = !v.get<bool>();
  else if (v.is_number_unsigned()) v = v.get<u64>() + 1;
  else if (v.is_number_integer()) v = v.get<i64>() + 1;
  else if (v.is_number()) v = v.get<double>() + 1;
  else if (v.is_string()) v = v.get<std::string>() + "x";
  else v = 0;
}

}  // namespace

TEST_CASE("ingest the shipped dataset") {
  const auto rep = ingest_records(std::string(ECSTAB_TEST_DATA) + "/curves.jsonl");
  CHECK(rep.errors.empty());
  const auto* r = rep.find("14a1");
  REQUIRE(r != nullptr);
  CHECK(r->rank == 0u);
  CHECK(r->torsion_order == 6);
  CHECK(r->sha_valuation(11) == 0u);
  CHECK(r->tamagawa_at(2) == 2u);
  CHECK(r->tamagawa_at(7) == 3u);
  CHECK(r->conductor == 14u);
  CHECK(r->bad_primes() == std::vector<u64>{2, 7});
  CHECK(r->reduction_at(7) == ReductionType::multiplicative_split);
  CHECK(r->tamagawa_complete());
}

TEST_CASE("ingest errors carry line numbers and keep valid lines") {
  const auto rep = ingest_text(
      "{\"label\":\"ok\",\"a\":1,\"b\":1,\"rank\":0,\"torsion_order\":1}\n"
      "{\"label\":\"sing\",\"a\":-3,\"b\":2,\"rank\":0,\"torsion_order\":1}\n"
      "\n"
      "not json\n"
      "{\"label\":\"norank\",\"a\":1,\"b\":2,\"torsion_order\":1}\n"
      "{\"label\":\"nonmin\",\"a\":16,\"b\":64,\"rank\":0,\"torsion_order\":1}\n");
  CHECK(rep.records.size() == 1);
  REQUIRE(rep.errors.size() == 4);
  CHECK(rep.errors[0].find("line 2") != std::string::npos);
  CHECK(rep.errors[1].find("line 4") != std::string::npos);
  CHECK(rep.errors[2].find("line 5") != std::string::npos);
  CHECK(rep.errors[3].find("line 6") != std::string::npos);
}

TEST_CASE("empty input and duplicates") {
  CHECK(ingest_text("").records.empty());
  CHECK(ingest_text("").errors.empty());
  const auto rep = ingest_text(
      "{\"label\":\"x\",\"a\":1,\"b\":1,\"rank\":0,\"torsion_order\":1}\n"
      "{\"label\":\"x\",\"a\":1,\"b\":1,\"rank\":1,\"torsion_order\":1}\n");
  CHECK(rep.records.size() == 1);
  CHECK(rep.find("x")->rank == 1u);
  CHECK(rep.warnings.size() == 1);
}

TEST_CASE("record JSON round trip") {
  const auto rep = ingest_records(std::string(ECSTAB_TEST_DATA) + "/curves.jsonl");
  for (const auto& r : rep.records) {
    const auto back = parse_record(to_json(r));
    CHECK(to_json(back) == to_json(r));
  }
}

TEST_CASE("sweep cache: miss, hit, overlap, corruption") {
  const auto dir = scratch("cache");
  const auto e = CurveQ::make(1, 1);
  SweepCache cache(dir);
  const TraceRequest req{3, 20000, 1, 0};
  const auto cold = cache.get_or_compute(e, req);
  CHECK(cache.misses() == 1);
  const auto path = cache.path_for(e, req);
  REQUIRE(fs::exists(path));
  std::ifstream f1(path, std::ios::binary);
  const std::string bytes1((std::istreambuf_iterator<char>(f1)), {});

  const auto warm = cache.get_or_compute(e, req);
  CHECK(cache.hits() == 1);
  CHECK(warm == cold);
  std::ifstream f2(path, std::ios::binary);
  CHECK(std::string((std::istreambuf_iterator<char>(f2)), {}) == bytes1);

  const TraceRequest sub{10000, 30000, 1, 0};
  const auto other = cache.get_or_compute(e, sub);
  for (const auto& t : other)
    for (const auto& c : cold)
      if (c.ell == t.ell) CHECK(c.a == t.a);

  const TraceRequest filtered{3, 20000, 5, 1};
  for (const auto& t : cache.get_or_compute(e, filtered)) CHECK(t.ell % 5 == 1);

  {
    std::fstream g(path, std::ios::binary | std::ios::in | std::ios::out);
    g.seekp(-3, std::ios::end);
    g.put('\x5a');
  }
  const auto again = cache.get_or_compute(e, req);
  CHECK(again == cold);
  CHECK(cache.recomputed() == 1);
  CHECK_FALSE(cache.warnings().empty());
  fs::remove_all(dir);
}

TEST_CASE("traces agree across thread counts and with direct counting") {
  const auto e = CurveQ::make(-1, 1);
  const TraceRequest req{3, 5000, 1, 0};
  const auto one = compute_traces(e, req, {}, 1);
  CHECK(compute_traces(e, req, {}, 3) == one);
  for (const auto& t : one)
    CHECK(t.a == frobenius_trace(std::get<CurveFp>(reduce_mod(e, t.ell))));
}

TEST_CASE("character JSON round trip") {
  const auto chi = build_split_extension(std::vector<u64>{2}, std::vector<u64>{7, 13}, 3, 1);
  CHECK(character_from_json(to_json(chi)) == chi);
  CHECK_THROWS_AS(character_from_json(json{{"p", 3}}), InputError);
}

TEST_CASE("certificate round trip and tampering") {
  const auto rep = ingest_records(std::string(ECSTAB_TEST_DATA) + "/curves.jsonl");
  const auto& r = *rep.find("14a1");
  const auto cert = certify_stability(*r.curve, 13, 1, std::vector<u64>{2, 7}, r);
  const json j = to_json(cert);
  CHECK(j.at("digest") == certificate_digest(j));
  CHECK(to_json(certificate_from_json(j)) == j);
  const auto ok = verify_certificate(j);
  CHECK(ok.ok);

  std::vector<json::json_pointer> paths;
  leaves(j, json::json_pointer(), paths);
  CHECK(paths.size() > 30);
  for (const auto& ptr : paths) {
    json t = j;
    perturb(t[ptr]);
    CHECK_MESSAGE(!verify_certificate(t).ok, ptr.to_string());
  }

  // Re-digested tampers of the mathematical content are still caught.
  for (const char* ptr : {"/character/exponents/0", "/chosen_primes/0", "/curve/a", "/curve/b", "/sigma/0", "/p",
                          "/character/generators/1"}) {
    json t = j;
    perturb(t[json::json_pointer(ptr)]);
    t["digest"] = certificate_digest(t);
    CHECK_MESSAGE(!verify_certificate(t).ok, std::string(ptr));
  }
}

TEST_CASE("cli: sl2, tp-count, kida, euler") {
  auto s = run({"sl2", "--p", "5"});
  CHECK(s.code == 0);
  CHECK(s.out == "95 95 match\n");
  auto t = run({"tp-count", "--p", "7"});
  CHECK(t.code == 0);
  CHECK(t.out.rfind("10 10 match", 0) == 0);
  CHECK(run({"kida", "--degree", "3", "--lambda", "1", "--p1", "3"}).out == "5\n");
  CHECK(run({"kida", "--degree", "3", "--p2", "3,3"}).out == "8\n");
  CHECK(run({"kida", "--degree", "9", "--p2", "2"}).code != 0);
  CHECK(run({"euler", "--sha", "1"}).out.find('1') != std::string::npos);
}

TEST_CASE("cli: usage errors are nonzero") {
  CHECK(run({}).code != 0);
  CHECK(run({"sl2"}).code != 0);
  CHECK(run({"sl2", "--p", "5", "--bogus"}).code != 0);
  CHECK(run({"frobnicate"}).code != 0);
  CHECK(run({"certify", "--curve", "nope", "--p", "13"}).code != 0);
}

TEST_CASE("cli: primes and extend") {
  auto p = run({"primes", "--a", "1", "--b", "1", "--p", "3", "--x", "13", "--mode", "T"});
  CHECK(p.code == 0);
  CHECK(p.out == "13\n");
  auto e = run({"extend", "--split", "2", "--primes", "7,13", "--p", "3"});
  CHECK(e.code == 0);
  CHECK(json::parse(e.out)["exponents"] == json::array({1, 1}));
  auto bad = run({"extend", "--primes", "13", "--p", "3", "--a", "1", "--b", "1"});
  CHECK(bad.code == kExitInvalid);
}

TEST_CASE("cli: certify, verify, and tamper") {
  const auto dir = scratch("cli");
  const auto cert = (dir / "c.json").string();
  auto c = run({"certify", "--curve", "14a1", "--p", "13", "--split", "2,7", "--out", cert});
  CHECK(c.code == 0);
  auto v = run({"verify", cert});
  CHECK(v.code == 0);
  CHECK(v.out.find("certificate verified") != std::string::npos);

  json j;
  std::ifstream(cert) >> j;
  j["character"]["exponents"][0] = j["character"]["exponents"][0].get<u64>() + 1;
  std::ofstream(dir / "t.json") << j.dump(2);
  CHECK(run({"verify", (dir / "t.json").string()}).code == kExitInvalid);

  std::ofstream(dir / "junk.json") << "{";
  CHECK(run({"verify", (dir / "junk.json").string()}).code == kExitInvalid);

  // withheld conclusions: still a verifiable certificate
  const auto w = (dir / "w.json").string();
  CHECK(run({"certify", "--curve", "14a1", "--p", "11", "--split", "2,7", "--out", w}).code == kExitWithheld);
  CHECK(run({"verify", w}).code == 0);

  auto ex = run({"certify", "--a", "1", "--b", "1", "--p", "5", "--n", "2", "--budget", "50"});
  CHECK(ex.code == kExitFailure);
  CHECK(json::parse(ex.err)["error"] == "selection_exhausted");
  fs::remove_all(dir);
}

TEST_CASE("cli output is deterministic") {
  const std::vector<std::string> args{"certify", "--curve", "14a1", "--p", "13", "--split", "2,7"};
  CHECK(run(args).out == run(args).out);
  const std::vector<std::string> d{"density", "--a", "1", "--b", "1", "--p", "5", "--x", "20000,40000"};
  CHECK(run(d).out == run(d).out);
}

TEST_CASE("cli: density csv and svg") {
  const auto dir = scratch("density");
  const auto csv = (dir / "s.csv").string(), svg = (dir / "s.svg").string();
  auto d = run({"density", "--a", "1", "--b", "1", "--p", "5", "--x", "10000,20000", "--csv", csv, "--svg", svg});
  CHECK(d.code == 0);
  std::ifstream f(csv);
  std::string header;
  std::getline(f, header);
  CHECK(header == "param,x,hits,total,ratio,reference,rel_error");
  int rows = 0;
  for (std::string line; std::getline(f, line);) rows += !line.empty();
  CHECK(rows == 2);
  std::ifstream s(svg);
  const std::string body((std::istreambuf_iterator<char>(s)), {});
  CHECK(body.find("<svg") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("cli: scan and bound") {
  auto s = run({"scan", "--p", "13"});
  CHECK(s.code == 0);
  CHECK(s.out.find("14a1") != std::string::npos);
  auto b = run({"bound", "--p", "1000000007"});
  CHECK(b.code == 0);
  CHECK(b.out.find("0.16") != std::string::npos);
}
