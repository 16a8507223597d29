#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rankbound/errors.hpp"
#include "rankbound/hierarchies.hpp"
#include "rankbound/instances.hpp"
#include "rankbound/sdpa_io.hpp"

namespace py = pybind11;
using namespace rankbound;

namespace {

Variants make_variants(bool dagger, const std::vector<Eigen::VectorXd>& V, bool kernel, bool psd_ideal_rows,
                       const std::vector<int>& tensor_levels, bool bilinear_cross) {
  Variants v;
  v.dagger = dagger;
  v.V = V;
  v.kernel = kernel;
  v.psd_ideal_rows = psd_ideal_rows;
  v.tensor_levels = tensor_levels;
  v.bilinear_cross = bilinear_cross;
  return v;
}

BoundRequest make_request(const Eigen::MatrixXd& A, const std::string& kind, int t, Variants v) {
  BoundRequest req;
  req.kind = parse_kind(kind);
  req.A = A;
  req.t = t;
  req.variants = std::move(v);
  return req;
}

py::dict result_dict(const BoundResult& r) {
  py::dict d;
  d["kind"] = to_string(r.kind);
  d["t"] = r.t;
  d["variants"] = r.variants;
  d["status"] = to_string(r.status);
  d["value"] = r.value ? py::cast(*r.value) : py::none();
  d["primal_objective"] = r.solution.primal_objective;
  d["dual_objective"] = r.solution.dual_objective;
  d["relative_gap"] = r.solution.relative_gap;
  d["iterations"] = r.solution.iterations;
  d["diagnostics"] = r.solution.diagnostics;
  d["flat"] = r.flat ? py::cast(r.flat->flat()) : py::none();
  d["moment_rank"] = r.flat ? py::cast(r.flat->rank()) : py::none();
  d["baselines"] = r.baselines;
  d["warnings"] = r.warnings;
  d["nvars"] = r.nvars;
  d["block_dims"] = r.block_dims;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "SDP lower bounds on cpsd-, cp-, nonnegative and psd-rank";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<UnknownFamily>(m, "UnknownFamily", base.ptr());
  py::register_exception<ParamRange>(m, "ParamRange", base.ptr());
  py::register_exception<ModeError>(m, "ModeError", base.ptr());
  py::register_exception<LevelError>(m, "LevelError", base.ptr());
  py::register_exception<ConflictingFix>(m, "ConflictingFix", base.ptr());
  py::register_exception<IllFormed>(m, "IllFormed", base.ptr());

  m.def("families", &families);
  m.def(
      "gen", [](const std::string& name, const std::vector<double>& params) { return gen(name, params).values; },
      py::arg("name"), py::arg("params") = std::vector<double>{});
  m.def(
      "parse_matrix", [](const std::string& text) { return parse_matrix(text).values; }, py::arg("text"));
  m.def(
      "load", [](const std::string& path) { return load(path).values; }, py::arg("path"));

  m.def(
      "compute_bound",
      [](const Eigen::MatrixXd& A, const std::string& kind, int t, bool dagger, const std::vector<Eigen::VectorXd>& V,
         bool kernel, bool psd_ideal_rows, const std::vector<int>& tensor_levels, bool bilinear_cross,
         bool with_baselines, double rank_tol) {
        BoundOptions opts;
        opts.baselines = with_baselines;
        opts.rank_tol = rank_tol;
        BoundResult r;
        {
          py::gil_scoped_release release;
          r = compute_bound(
              make_request(A, kind, t, make_variants(dagger, V, kernel, psd_ideal_rows, tensor_levels, bilinear_cross)),
              opts);
        }
        return result_dict(r);
      },
      py::arg("A"), py::arg("kind") = "cpsd", py::arg("t") = 1, py::kw_only(), py::arg("dagger") = false,
      py::arg("V") = std::vector<Eigen::VectorXd>{}, py::arg("kernel") = false, py::arg("psd_ideal_rows") = false,
      py::arg("tensor_levels") = std::vector<int>{}, py::arg("bilinear_cross") = false,
      py::arg("baselines") = false, py::arg("rank_tol") = 1e-6);

  m.def(
      "baselines",
      [](const Eigen::MatrixXd& A, const std::string& kind) {
        py::gil_scoped_release release;
        return baselines(parse_kind(kind), A);
      },
      py::arg("A"), py::arg("kind") = "cpsd");
  m.def("analytic_cpsd", &analytic_cpsd, py::arg("A"));
  m.def("analytic_psd", &analytic_psd, py::arg("A"));

  m.def(
      "export_sdpa",
      [](const Eigen::MatrixXd& A, const std::string& kind, int t, bool dagger, const std::vector<Eigen::VectorXd>& V,
         bool kernel, bool psd_ideal_rows, bool equality_extension) {
        const BuiltProblem bp =
            build(make_request(A, kind, t, make_variants(dagger, V, kernel, psd_ideal_rows, {}, false)));
        SdpaOptions o;
        o.equality_extension = equality_extension;
        return export_sdpa(bp.problem, o);
      },
      py::arg("A"), py::arg("kind") = "cpsd", py::arg("t") = 1, py::kw_only(), py::arg("dagger") = false,
      py::arg("V") = std::vector<Eigen::VectorXd>{}, py::arg("kernel") = false, py::arg("psd_ideal_rows") = false,
      py::arg("equality_extension") = false);
}
