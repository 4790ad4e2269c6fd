#include "ecstab/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "ecstab/density.hpp"
#include "ecstab/iwasawa.hpp"
#include "ecstab/serialize.hpp"
#include "ecstab/stability.hpp"

#ifndef ECSTAB_DATA_DIR
#define ECSTAB_DATA_DIR "data"
#endif

namespace ecstab {

using nlohmann::json;

std::string default_records_path() {
  if (const char* env = std::getenv("ECSTAB_RECORDS")) return env;
  return std::string(ECSTAB_DATA_DIR) + "/curves.jsonl";
}

namespace {

struct Globals {
  double tolerance = 1e-12;
  double c1 = 1.0;
  u64 threshold = 10000;
  unsigned threads = 1;
  std::string records;
};

struct CurveArgs {
  std::string label;
  std::optional<i64> a;
  std::optional<i64> b;
};

void add_curve_options(CLI::App* cmd, CurveArgs& c) {
  cmd->add_option("--curve", c.label, "Curve label looked up in the records file");
  cmd->add_option("--a", c.a, "Coefficient a of y^2 = x^3 + a x + b");
  cmd->add_option("--b", c.b, "Coefficient b");
}

// Record for the requested curve; a bare (a, b) gets an empty record.
CurveArithRecord resolve_curve(const CurveArgs& c, const Globals& g, std::ostream& err) {
  if (!c.label.empty()) {
    const std::string path = g.records.empty() ? default_records_path() : g.records;
    auto rep = ingest_records(path);
    for (const auto& w : rep.warnings) err << "warning: " << w << '\n';
    if (const auto* r = rep.find(c.label)) return *r;
    throw InputError("label " + c.label + " not found in " + path);
  }
  if (!c.a || !c.b) throw InputError("give --curve LABEL or both --a and --b");
  CurveArithRecord r;
  r.curve = CurveQ::make(*c.a, *c.b);
  r.label = "a=" + std::to_string(*c.a) + ",b=" + std::to_string(*c.b);
  r.source = "command line";
  return r;
}

void print_checks(std::ostream& out, const std::vector<Check>& items) {
  for (const auto& i : items) out << (i.pass ? "PASS " : "FAIL ") << i.name << ": " << i.evidence << '\n';
}

int emit_certificate(const StabilityCertificate& cert, const std::string& path, std::ostream& out,
                     const std::string& decisive) {
  const json j = to_json(cert);
  if (path.empty()) {
    out << j.dump(2) << '\n';
  } else {
    std::ofstream f(path);
    if (!f) throw InputError("cannot write " + path);
    f << j.dump(2) << '\n';
    out << "wrote " << path << '\n';
  }
  for (const auto& c : cert.conclusions)
    if (decisive.empty() ? !c.asserted : (c.name == decisive && !c.asserted)) return kExitWithheld;
  return 0;
}

std::vector<u64> parse_checkpoints(const std::vector<u64>& xs) {
  if (xs.empty()) throw InputError("need at least one --x value");
  return xs;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stability certificates and density checks for elliptic curves over Q", "ecstab"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--tolerance", g.tolerance, "Series truncation tolerance")->check(CLI::PositiveNumber);
  app.add_option("--c1", g.c1, "Constant in the trace-count bound")->check(CLI::NonNegativeNumber);
  app.add_option("--threshold", g.threshold, "Exhaustive point counting below this prime");
  app.add_option("--threads", g.threads, "Worker threads for sweeps")->check(CLI::Range(1u, 256u));
  app.add_option("--records", g.records, "JSON-lines curve records");

  std::function<int()> action;
  CountOptions count;

  // certify / growth
  CurveArgs ccurve;
  u64 cp = 0, cbudget = 100000, cfrom = 2;
  unsigned cn = 1;
  std::vector<u64> csplit;
  std::string cout_path;
  auto certify = app.add_subcommand("certify", "Build a stability certificate");
  auto growth = app.add_subcommand("growth", "Build a Selmer growth certificate");
  for (auto* cmd : {certify, growth}) {
    add_curve_options(cmd, ccurve);
    cmd->add_option("--p", cp, "Odd prime p")->required();
    cmd->add_option("--n", cn, "Level n");
    cmd->add_option("--split", csplit, "Primes that must split, comma separated")->delimiter(',');
    cmd->add_option("--budget", cbudget, "Largest prime considered for ramification");
    cmd->add_option("--from", cfrom, "Smallest prime considered for ramification");
    cmd->add_option("--out", cout_path, "Write the certificate here instead of stdout");
  }
  auto run_cert = [&](bool stab) {
    return [&, stab]() {
      const auto rec = resolve_curve(ccurve, g, err);
      CertifyOptions opt;
      opt.prime_budget = cbudget;
      opt.search_lo = cfrom;
      opt.verdict.count = count;
      try {
        if (stab) return emit_certificate(certify_stability(*rec.curve, cp, cn, csplit, rec, opt), cout_path, out, "");
        return emit_certificate(selmer_growth_certificate(*rec.curve, cp, cn, csplit, rec, opt), cout_path, out,
                                "rank_or_sha_growth");
      } catch (const SelectionExhausted& e) {
        json j{{"error", "selection_exhausted"},
               {"message", e.what()},
               {"window", {e.stats.lo, e.stats.hi}},
               {"congruence_candidates", e.stats.congruence_candidates},
               {"qualifying", e.stats.qualifying},
               {"needed", e.stats.needed}};
        err << j.dump() << '\n';
        return static_cast<int>(kExitFailure);
      }
    };
  };
  certify->callback([&] { action = run_cert(true); });
  growth->callback([&] { action = run_cert(false); });

  // primes
  auto primes = app.add_subcommand("primes", "List admissible congruence primes");
  CurveArgs pcurve;
  std::string pmode = "S";
  u64 pp = 0, px = 0, pfrom = 2;
  unsigned pn = 1;
  add_curve_options(primes, pcurve);
  primes->add_option("--mode", pmode, "S or T")->check(CLI::IsMember({"S", "T"}));
  primes->add_option("--p", pp)->required();
  primes->add_option("--n", pn);
  primes->add_option("--x", px, "Upper end of the range")->required();
  primes->add_option("--from", pfrom, "Lower end of the range");
  primes->callback([&] {
    action = [&] {
      const auto rec = resolve_curve(pcurve, g, err);
      const auto list = enumerate_congruence_primes(*rec.curve, pp, pn, pfrom, px,
                                                    pmode == "S" ? PrimeMode::S : PrimeMode::T, count);
      for (std::size_t i = 0; i < list.size(); ++i) out << (i ? " " : "") << list[i];
      out << '\n';
      return 0;
    };
  });

  // extend
  auto extend = app.add_subcommand("extend", "Build a split cyclic character");
  std::vector<u64> esplit, eprimes;
  u64 ep = 0;
  unsigned en = 1;
  CurveArgs ecurve;
  extend->add_option("--split", esplit)->delimiter(',');
  extend->add_option("--primes", eprimes)->delimiter(',')->required();
  extend->add_option("--p", ep)->required();
  extend->add_option("--n", en);
  add_curve_options(extend, ecurve);
  extend->callback([&] {
    action = [&] {
      const auto chi = build_split_extension(esplit, eprimes, ep, en);
      out << to_json(chi).dump() << '\n';
      if (!ecurve.label.empty() || ecurve.a) {
        const auto rec = resolve_curve(ecurve, g, err);
        const auto items = verify_extension(chi, esplit, *rec.curve, count);
        for (const auto& i : items) out << (i.pass ? "PASS " : "FAIL ") << i.name << ": " << i.evidence << '\n';
        return all_pass(items) ? 0 : static_cast<int>(kExitInvalid);
      }
      return 0;
    };
  });

  // verify
  auto verify = app.add_subcommand("verify", "Re-check a certificate file");
  std::string vpath;
  verify->add_option("certificate", vpath)->required();
  verify->callback([&] {
    action = [&] {
      std::ifstream f(vpath);
      if (!f) throw InputError("cannot open " + vpath);
      json j;
      try {
        j = json::parse(f);
      } catch (const json::exception& e) {
        err << "malformed certificate: " << e.what() << '\n';
        return static_cast<int>(kExitInvalid);
      }
      const auto rep = verify_certificate(j, count);
      print_checks(out, rep.items);
      out << (rep.ok ? "certificate verified" : "certificate REJECTED") << '\n';
      return rep.ok ? 0 : static_cast<int>(kExitInvalid);
    };
  });

  // kida
  auto kida = app.add_subcommand("kida", "Evaluate the lambda formula");
  KidaInput kin;
  kida->add_option("--degree", kin.degree)->required();
  kida->add_option("--lambda", kin.lambda_base);
  kida->add_option("--p1", kin.p1_e, "Ramification indices over split multiplicative primes")->delimiter(',');
  kida->add_option("--p2", kin.p2_e, "Ramification indices over primes with a p-torsion point")->delimiter(',');
  kida->callback([&] {
    action = [&] {
      out << kida_lambda(kin) << '\n';
      return 0;
    };
  });

  // euler
  auto euler = app.add_subcommand("euler", "Valuation of the truncated Euler characteristic");
  EulerComponents ec;
  std::vector<u64> etors_counts;
  u64 eprime = 0;
  CurveArgs eucurve;
  euler->add_option("--reg", ec.regulator, "v_p of the regulator");
  euler->add_option("--sha", ec.sha, "v_p of #Sha");
  euler->add_option("--tamagawa", ec.tamagawa, "v_p(c_v) list")->delimiter(',');
  euler->add_option("--torsion", ec.reduced_torsion, "v_p(#E~(k_v)[p^infty]) list")->delimiter(',');
  euler->add_option("--p", eprime, "With --curve: evaluate from the record");
  add_curve_options(euler, eucurve);
  euler->callback([&] {
    action = [&] {
      if (!eucurve.label.empty()) {
        const auto rec = resolve_curve(eucurve, g, err);
        if (eprime < 3 || !is_prime(eprime)) throw InputError("--p must be an odd prime");
        std::vector<u64> tors;
        if (rec.curve->discriminant() % static_cast<i128>(eprime) != 0)
          tors.push_back(count_points(std::get<CurveFp>(reduce_mod(*rec.curve, eprime)), count));
        const auto r = euler_characteristic_valuation(rec, eprime, tors);
        out << r.valuation << '\n';
        for (const auto& a : r.assumptions) out << "assumption: " << a << '\n';
        return 0;
      }
      out << euler_characteristic_valuation(ec) << '\n';
      return 0;
    };
  });

  // density
  auto density = app.add_subcommand("density", "Empirical density sweep");
  CurveArgs dcurve;
  u64 dp = 5;
  unsigned dn = 1;
  std::string dmode = "S", dcsv, dsvg;
  std::vector<u64> dxs;
  bool dsweep = false;
  add_curve_options(density, dcurve);
  density->add_flag("--sweep", dsweep, "Run the sweep (default)");
  density->add_option("--p", dp);
  density->add_option("--n", dn);
  density->add_option("--mode", dmode)->check(CLI::IsMember({"S", "T", "PEc"}));
  density->add_option("--x", dxs, "Checkpoints, comma separated")->delimiter(',')->required();
  density->add_option("--csv", dcsv, "Write CSV here");
  density->add_option("--svg", dsvg, "Write an SVG chart here");
  density->callback([&] {
    action = [&] {
      const auto rec = resolve_curve(dcurve, g, err);
      auto cache = SweepCache::from_environment();
      SweepOptions so{count, &cache, g.threads};
      const SweepMode m = dmode == "S" ? SweepMode::S : dmode == "T" ? SweepMode::T : SweepMode::PEc;
      const auto r = empirical_density_sweep(*rec.curve, dp, dn, parse_checkpoints(dxs), m, so);
      for (const auto& w : cache.warnings()) err << "warning: " << w << '\n';
      write_sweep_csv(out, r);
      if (!dcsv.empty()) {
        std::ofstream f(dcsv);
        write_sweep_csv(f, r);
      }
      if (!dsvg.empty()) {
        std::ofstream f(dsvg);
        write_sweep_svg(f, r, r.param);
      }
      if (r.empty) err << "empty result: no qualifying prime below the first checkpoint\n";
      return 0;
    };
  });

  // population
  auto population = app.add_subcommand("population", "Good-reduction proportion over curves ordered by height");
  u64 pell = 5;
  std::vector<u64> pxs;
  population->add_option("--ell", pell)->required();
  population->add_option("--x", pxs, "Height checkpoints")->delimiter(',')->required();
  population->callback([&] {
    action = [&] {
      const auto r = population_sweep(pell, parse_checkpoints(pxs));
      write_sweep_csv(out, r);
      for (const auto& n : r.notes) err << "note: " << n << '\n';
      return 0;
    };
  });

  // tp-count
  auto tp = app.add_subcommand("tp-count", "Count pairs with #E(F_p) in {p, p+1}");
  u64 tpp = 0;
  tp->add_option("--p", tpp)->required();
  tp->callback([&] {
    action = [&] {
      const auto t = count_tp(tpp);
      const bool closed = tp_twist_closed(tpp, t.members);
      out << t.character_sum << ' ' << t.enumeration << ' ' << (t.agree() ? "match" : "MISMATCH")
          << (closed ? " twist-closed" : " NOT-twist-closed") << '\n';
      return t.agree() && closed ? 0 : static_cast<int>(kExitFailure);
    };
  });

  // sl2
  auto sl2 = app.add_subcommand("sl2", "Count SL2(F_p) matrices with trace != 2");
  u64 slp = 0;
  sl2->add_option("--p", slp)->required();
  sl2->callback([&] {
    action = [&] {
      const auto [brute, closed] = sl2_trace_count(slp);
      out << brute << ' ' << closed << ' ' << (brute == closed ? "match" : "MISMATCH") << '\n';
      return brute == closed ? 0 : static_cast<int>(kExitFailure);
    };
  });

  // bound
  auto bound = app.add_subcommand("bound", "Evaluate the density lower bound");
  u64 bp = 0;
  bool blenstra = false;
  bound->add_option("--p", bp)->required();
  bound->add_flag("--lenstra", blenstra, "Also check the trace-count bound (slow for large p)");
  bound->callback([&] {
    action = [&] {
      const auto lb = lower_bound_density(bp, g.c1);
      out << std::setprecision(12);
      out << "one_sixth " << lb.one_sixth << "\ninv_p " << lb.inv_p << "\ndelaunay " << lb.delaunay << "\nzeta_tail "
          << lb.zeta_p_tail << "\nsqrt_term " << lb.sqrt_term << "\nlower_bound " << lb.value << "\nerror_bound "
          << lb.error_bound << '\n';
      const auto del = delaunay_proportion(bp, g.tolerance);
      out << "delaunay_at_tolerance " << del.value << " +- " << del.error_bound << '\n';
      if (blenstra) {
        const auto bc = lenstra_bound_check(bp, g.c1);
        out << "tp_count " << bc.count << " bound " << bc.bound << (bc.pass ? " pass" : " fail") << " min_c1 "
            << bc.min_c1 << (bc.small_p ? " (small p)" : "") << '\n';
      }
      return 0;
    };
  });

  // scan
  auto scan = app.add_subcommand("scan", "Screen a record file at p");
  u64 sp = 0;
  std::string spath;
  scan->add_option("--p", sp)->required();
  scan->add_option("--file", spath, "Records to scan (defaults to --records)");
  scan->callback([&] {
    action = [&] {
      const std::string path = !spath.empty() ? spath : (g.records.empty() ? default_records_path() : g.records);
      const auto rep = ingest_records(path);
      for (const auto& e : rep.errors) err << "error: " << e << '\n';
      std::size_t screened = 0;
      for (const auto& r : rep.records) {
        const bool rank0 = r.rank && *r.rank == 0;
        const bool good23 = r.conductor && *r.conductor % 2 != 0 && *r.conductor % 3 != 0;
        const auto v = check_pe_membership(*r.curve, sp, r, {1000, count});
        bool irreducible = false, ordinary = false;
        for (const auto& c : v.reasons) {
          if (c.name == "irreducible_mod_p") irreducible = c.status == Status::pass;
          if (c.name == "good_ordinary") ordinary = c.status == Status::pass;
        }
        const bool ok = rank0 && irreducible && good23 && ordinary && v.member;
        if (ok) ++screened;
        out << r.label << (ok ? " in" : " out") << " rank0=" << rank0 << " irreducible=" << irreducible
            << " good_2_3=" << good23 << " ordinary=" << ordinary << " member=" << v.member
            << (v.conditional ? " (conditional)" : "") << '\n';
      }
      const double frac = rep.records.empty() ? 0.0 : static_cast<double>(screened) / rep.records.size();
      out << "screened " << screened << '/' << rep.records.size() << " = " << frac;
      if (sp >= 11) out << " lower_bound " << lower_bound_density(sp, g.c1).value;
      out << '\n';
      return 0;
    };
  });

  std::vector<std::string> argv_store{"ecstab"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }
  count.exhaustive_threshold = g.threshold;
  if (!action) return kExitInvalid;
  try {
    return action();
  } catch (const InputError& e) {
    err << "input error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace ecstab
