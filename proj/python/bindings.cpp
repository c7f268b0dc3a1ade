#include "conestab/json_io.hpp"
#include "conestab/oracle.hpp"
#include "conestab/proj_deriv.hpp"
#include "conestab/repro.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace conestab;

namespace {

Tol make_tol(double membership, double zero, int max_iter) {
  Tol t{membership, zero, max_iter};
  t.validate();
  return t;
}

py::dict cert_dict(const Certificate& c) {
  py::dict d;
  d["verdict"] = to_string(c.verdict);
  d["residual"] = c.residual;
  d["witness"] = c.witness ? py::cast(*c.witness) : py::none();
  d["method"] = c.method;
  d["assumed"] = c.assumed;
  d["checked"] = c.checked;
  d["detail"] = c.detail;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Stability certificates for conic constraint systems";

  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
  py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);

  py::class_<Tol>(m, "Tol")
      .def(py::init(&make_tol), py::arg("membership") = 1e-8, py::arg("zero") = 1e-9,
           py::arg("max_iter") = 10000)
      .def_readonly("membership", &Tol::membership)
      .def_readonly("zero", &Tol::zero)
      .def_readonly("max_iter", &Tol::max_iter);

  py::class_<ConeDesc>(m, "Cone")
      .def_static("from_json", &cone_from_json, py::arg("text"))
      .def("to_json", &cone_to_json)
      .def_property_readonly("dim", &ConeDesc::dim)
      .def("polar", &ConeDesc::polar)
      .def("describe", &ConeDesc::describe)
      .def("__repr__", [](const ConeDesc& k) { return "Cone(" + k.describe() + ")"; });

  m.def("project", py::overload_cast<const ConeDesc&, const AmbientVec&>(&project), py::arg("cone"), py::arg("z"));
  m.def("contains", &contains, py::arg("cone"), py::arg("z"), py::arg("tol") = Tol{});
  m.def("proj_dir_deriv", &proj_dir_deriv, py::arg("cone"), py::arg("z"), py::arg("h"), py::arg("tol") = Tol{});
  m.def(
      "fd_proj_deriv",
      [](const ConeDesc& k, const Vec& z, const Vec& h) {
        const FdEstimate e = fd_proj_deriv(k, z, h);
        return py::make_tuple(e.value, e.error);
      },
      py::arg("cone"), py::arg("z"), py::arg("h"));
  m.def("svec", &svec, py::arg("matrix"));
  m.def(
      "smat", [](const Vec& v, int order) { return smat(v, order); }, py::arg("v"), py::arg("order"));

  m.def("repro_names", &repro_names);
  m.def(
      "repro",
      [](const std::string& name, const Tol& tol) {
        const ReproResult r = run_repro(name, tol);
        py::list checks;
        for (const auto& c : r.checks) {
          checks.append(py::make_tuple(c.name, c.expected, c.observed, c.match()));
        }
        py::dict certs;
        for (const auto& e : r.report.entries) certs[py::str(e.name)] = cert_dict(e.cert);
        py::dict out;
        out["ok"] = r.ok();
        out["checks"] = checks;
        out["certificates"] = certs;
        out["notes"] = r.report.notes;
        return out;
      },
      py::arg("name"), py::arg("tol") = Tol{});

  m.def(
      "example1_strict_complementarity",
      [](const Tol& tol) {
        return cert_dict(strict_complementarity_check(example1_system(), example1_point(), Vec::Zero(3), tol));
      },
      py::arg("tol") = Tol{});
  m.def(
      "example41_isolated_calm",
      [](const Tol& tol) { return cert_dict(solution_map_isolated_calm(example41_problem(), example41_multiplier(), tol)); },
      py::arg("tol") = Tol{});
  m.def(
      "analyze_json",
      [](const std::string& problem_text, const Tol& tol) {
        const ProblemSpec spec = problem_from_json(problem_text);
        if (spec.points.empty()) throw InputError("problem has no points");
        const PointSpec& pt = spec.points.count("xbar") ? spec.points.at("xbar") : spec.points.begin()->second;
        const Vec v = pt.v.value_or(Vec::Zero(spec.sys.domain_dim()));
        const MultiplierSolveResult ms = multiplier_solve(spec.sys, pt.x, v, tol);
        py::dict out;
        out["multiplier_existence"] = cert_dict(ms.existence);
        if (ms.found) out["srcq"] = cert_dict(ms.uniqueness);
        out["nondegeneracy"] = cert_dict(nondegeneracy_check(spec.sys, pt.x, tol));
        return out;
      },
      py::arg("problem_json"), py::arg("tol") = Tol{});
}
