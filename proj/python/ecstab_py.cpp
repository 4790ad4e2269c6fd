#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "ecstab/cli.hpp"
#include "ecstab/density.hpp"
#include "ecstab/iwasawa.hpp"
#include "ecstab/serialize.hpp"
#include "ecstab/stability.hpp"

namespace py = pybind11;
using namespace ecstab;

namespace {

// Structured values cross the boundary as JSON text; the Python package
// decodes them.
std::string dumps(const nlohmann::json& j) { return j.dump(); }

CurveArithRecord record_for(i64 a, i64 b, const std::string& label, const std::string& records) {
  if (!label.empty()) {
    const auto rep = ingest_records(records.empty() ? default_records_path() : records);
    if (const auto* r = rep.find(label)) return *r;
    throw InputError("label " + label + " not found");
  }
  CurveArithRecord r;
  r.curve = CurveQ::make(a, b);
  r.label = "a=" + std::to_string(a) + ",b=" + std::to_string(b);
  return r;
}

}  // namespace

PYBIND11_MODULE(_ecstab, m) {
  m.doc() = "Elliptic curve stability certificates and density checks";
  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);

  m.def("count_points", [](u64 ell, i64 a, i64 b) {
    return count_points(std::get<CurveFp>(reduce_mod(CurveQ::make(a, b), ell)));
  }, py::arg("ell"), py::arg("a"), py::arg("b"));
  m.def("reduction_type", [](i64 a, i64 b, u64 ell) {
    return std::string(to_string(reduction_type(CurveQ::make(a, b), ell)));
  }, py::arg("a"), py::arg("b"), py::arg("ell"));
  m.def("height", &height, py::arg("a"), py::arg("b"));
  m.def("is_minimal", &is_minimal, py::arg("a"), py::arg("b"));

  m.def("build_split_extension", [](const std::vector<u64>& sigma, const std::vector<u64>& primes, u64 p, unsigned n) {
    return dumps(to_json(build_split_extension(sigma, primes, p, n)));
  }, py::arg("sigma"), py::arg("primes"), py::arg("p"), py::arg("n") = 1);
  m.def("frobenius_image", [](const std::string& chi, u64 q) {
    return frobenius_image(character_from_json(nlohmann::json::parse(chi)), q);
  }, py::arg("chi"), py::arg("q"));

  m.def("kida_lambda", [](u64 degree, u64 lambda_base, std::vector<u64> p1, std::vector<u64> p2) {
    return kida_lambda({degree, lambda_base, std::move(p1), std::move(p2)});
  }, py::arg("degree"), py::arg("lambda_base") = 0, py::arg("p1") = std::vector<u64>{},
     py::arg("p2") = std::vector<u64>{});
  m.def("euler_characteristic_valuation",
        [](i64 reg, u64 sha, std::vector<u64> tamagawa, std::vector<u64> torsion) {
          return euler_characteristic_valuation(EulerComponents{reg, sha, std::move(tamagawa), std::move(torsion)});
        },
        py::arg("regulator") = 0, py::arg("sha") = 0, py::arg("tamagawa") = std::vector<u64>{},
        py::arg("reduced_torsion") = std::vector<u64>{});

  m.def("s_density", [](u64 p, unsigned n) {
    const auto d = theoretical_s_density(p, n);
    return py::make_tuple(to_string(d.value.num), to_string(d.value.den));
  }, py::arg("p"), py::arg("n") = 1);
  m.def("sl2_trace_count", &sl2_trace_count, py::arg("p"));
  m.def("count_tp", [](u64 p) {
    const auto t = count_tp(p);
    return py::make_tuple(t.character_sum, t.enumeration);
  }, py::arg("p"));
  m.def("delaunay_proportion", [](u64 p, double tol) {
    const auto s = delaunay_proportion(p, tol);
    return py::make_tuple(s.value, s.error_bound);
  }, py::arg("p"), py::arg("tol") = 1e-12);
  m.def("zeta_tail", [](double s, double tol) {
    const auto z = zeta_tail(s, tol);
    return py::make_tuple(z.value, z.error_bound);
  }, py::arg("s"), py::arg("tol") = 1e-12);
  m.def("lower_bound_density", [](u64 p, double c1) {
    const auto l = lower_bound_density(p, c1);
    py::dict d;
    d["value"] = l.value;
    d["one_sixth"] = l.one_sixth;
    d["inv_p"] = l.inv_p;
    d["delaunay"] = l.delaunay;
    d["zeta_p_tail"] = l.zeta_p_tail;
    d["sqrt_term"] = l.sqrt_term;
    d["error_bound"] = l.error_bound;
    return d;
  }, py::arg("p"), py::arg("c1") = 1.0);

  m.def("certify", [](u64 p, unsigned n, const std::vector<u64>& split, const std::string& label, i64 a, i64 b,
                      const std::string& records, bool growth) {
    const auto rec = record_for(a, b, label, records);
    py::gil_scoped_release release;
    const auto c = growth ? selmer_growth_certificate(*rec.curve, p, n, split, rec)
                          : certify_stability(*rec.curve, p, n, split, rec);
    return dumps(to_json(c));
  }, py::arg("p"), py::arg("n") = 1, py::arg("split") = std::vector<u64>{}, py::arg("label") = "", py::arg("a") = 0,
     py::arg("b") = 0, py::arg("records") = "", py::arg("growth") = false);
  m.def("verify_certificate", [](const std::string& text) {
    const auto rep = verify_certificate(nlohmann::json::parse(text));
    py::list items;
    for (const auto& i : rep.items) items.append(py::make_tuple(i.name, i.pass, i.evidence));
    return py::make_tuple(rep.ok, items);
  }, py::arg("certificate"));

  m.def("run_command", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run_command(args, out, err);
    return py::make_tuple(code, out.str(), err.str());
  }, py::arg("args"));
}
