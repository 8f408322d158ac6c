#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "sparse_rom/errors.hpp"
#include "sparse_rom/fom.hpp"
#include "sparse_rom/harness.hpp"
#include "sparse_rom/interp.hpp"
#include "sparse_rom/multiindex.hpp"
#include "sparse_rom/points.hpp"
#include "sparse_rom/providers.hpp"

namespace py = pybind11;
using namespace sparse_rom;

namespace {

// Snapshot map backed by a Python callable y -> sequence of floats.
class PyCallableMap : public SnapshotMap {
 public:
  PyCallableMap(std::size_t d, std::size_t D, py::function f) : d_(d), D_(D), f_(std::move(f)) {}
  std::size_t dimension() const override { return d_; }
  std::size_t output_size() const override { return D_; }
  Eigen::VectorXd evaluate(std::span<const double> y) const override {
    py::gil_scoped_acquire gil;
    auto v = f_(std::vector<double>(y.begin(), y.end())).cast<Eigen::VectorXd>();
    if (static_cast<std::size_t>(v.size()) != D_)
      throw DimensionError("callable returned " + std::to_string(v.size()) + " values, expected " + std::to_string(D_));
    return v;
  }

 private:
  std::size_t d_, D_;
  py::function f_;
};

std::vector<MultiIndex> to_indices(const std::vector<std::vector<int>>& raw) {
  std::vector<MultiIndex> out;
  out.reserve(raw.size());
  for (const auto& e : raw) out.emplace_back(e);
  return out;
}

std::vector<std::vector<int>> from_indices(const std::vector<MultiIndex>& set) {
  std::vector<std::vector<int>> out;
  for (const auto& m : set) out.emplace_back(m.exponents().begin(), m.exponents().end());
  return out;
}

TensorGrid make_grid(const std::vector<std::string>& rules, std::size_t n) {
  TensorGrid grid;
  for (const auto& r : rules) grid.push_back(make_point_rule(parse_point_rule_kind(r), n));
  return grid;
}

py::dict study_dict(const StudyResult& r) {
  py::dict d;
  std::vector<std::size_t> N;
  std::vector<double> mean, max;
  for (const auto& row : r.rows) {
    N.push_back(row.N);
    mean.push_back(row.mean_rel_l2);
    max.push_back(row.max_rel_l2);
  }
  d["rule"] = std::string(to_string(r.rule));
  d["N"] = N;
  d["mean_rel_l2"] = mean;
  d["max_rel_l2"] = max;
  d["snapshot_solves"] = r.snapshot_solves;
  d["reference_solves"] = r.reference_solves;
  return d;
}

StudyConfig config_from_text(const std::string& text) {
  std::istringstream in(text);
  return parse_study_config(in);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Sparse polynomial interpolation of parametric flow snapshots";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DimensionError>(m, "DimensionError", base.ptr());
  py::register_exception<InvalidSetError>(m, "InvalidSetError", base.ptr());
  py::register_exception<OutOfRangeError>(m, "OutOfRangeError", base.ptr());
  py::register_exception<InvalidInputError>(m, "InvalidInputError", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<GeometryError>(m, "GeometryError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<StaleCacheError>(m, "StaleCacheError", base.ptr());
  py::register_exception<SolverError>(m, "SolverError", base.ptr());
  py::register_exception<DivergenceError>(m, "DivergenceError", base.ptr());

  m.def("canonical_sequence",
        [](std::size_t d, std::size_t count) { return from_indices(canonical_sequence(d, count)); }, py::arg("d"),
        py::arg("count"));
  m.def("is_downward_closed", [](const std::vector<std::vector<int>>& s) {
    const auto set = to_indices(s);
    return is_downward_closed(set);
  });

  m.def("leja_sequence", &leja_sequence, py::arg("n"), py::arg("x1") = 0.0,
        py::arg("grid_resolution") = kDefaultGridResolution);
  m.def("symmetrized_leja", &symmetrized_leja, py::arg("n"), py::arg("grid_resolution") = kDefaultGridResolution);
  m.def("leja_order", [](const std::vector<double>& p) { return leja_order(p); });
  m.def("equidistant", &equidistant, py::arg("m"));
  m.def(
      "point_rule",
      [](const std::string& kind, std::size_t n, std::size_t master_size) {
        PointRuleOptions opt;
        opt.master_size = master_size;
        return make_point_rule(parse_point_rule_kind(kind), n, opt).points;
      },
      py::arg("kind"), py::arg("n"), py::arg("master_size") = 0);

  py::class_<SparseInterpolant>(m, "SparseInterpolant")
      .def_static(
          "build",
          [](const std::vector<std::vector<int>>& indices, const std::vector<std::string>& rules, py::function f,
             std::size_t output_size, std::size_t rule_length) {
            if (indices.empty()) throw InvalidSetError("empty index set");
            std::size_t n = rule_length;
            for (const auto& e : indices)
              for (int v : e) n = std::max(n, static_cast<std::size_t>(v) + 1);
            PyCallableMap map(indices.front().size(), output_size, std::move(f));
            return SparseInterpolant::build(DownwardClosedSet(to_indices(indices)), make_grid(rules, n), map);
          },
          py::arg("indices"), py::arg("rules"), py::arg("f"), py::arg("output_size") = 1, py::arg("rule_length") = 0)
      .def(
          "enrich",
          [](const SparseInterpolant& self, const std::vector<std::vector<int>>& extra, py::function f) {
            PyCallableMap map(self.dimension(), self.output_size(), std::move(f));
            return self.enrich(to_indices(extra), map);
          },
          py::arg("extra"), py::arg("f"))
      .def("__call__", [](const SparseInterpolant& self, const std::vector<double>& y) { return self.evaluate(y); })
      .def_property_readonly("indices", [](const SparseInterpolant& self) { return from_indices(self.index_set().indices()); })
      .def_property_readonly("snapshot_count", &SparseInterpolant::snapshot_count)
      .def_property_readonly("dimension", &SparseInterpolant::dimension)
      .def_property_readonly("output_size", &SparseInterpolant::output_size)
      .def("save", &SparseInterpolant::save)
      .def_static("load", &SparseInterpolant::load);

  m.def(
      "solve_flow",
      [](const std::string& model, const std::vector<double>& param, int nx, int ny, std::optional<double> nu,
         std::optional<double> tol) {
        FomProblem problem = model == "narrowing" ? FomProblem::narrowing()
                             : model == "curved"  ? FomProblem::curved()
                                                  : throw ConfigError("unknown model '" + model + "'");
        if (nx > 0) problem.nx = nx;
        if (ny > 0) problem.ny = ny;
        if (nu) problem.flow.nu_visc = *nu;
        if (tol) problem.flow.oseen_tol = *tol;
        FomSnapshotMap map(problem);
        const auto y = problem.parameters.to_reference(param);
        OseenResult r;
        {
          py::gil_scoped_release release;
          r = map.solve(y);
        }
        py::dict d;
        d["velocity"] = r.field.velocity;
        d["pressure"] = r.field.pressure;
        d["iterations"] = r.iterations;
        d["trace"] = r.trace;
        std::vector<std::array<double, 2>> nodes;
        for (const auto& p : r.field.mesh->nodes()) nodes.push_back({p.x, p.y});
        d["nodes"] = nodes;
        d["divergence_residual"] = divergence_residual(*r.field.mesh, r.field.velocity);
        return d;
      },
      py::arg("model"), py::arg("param"), py::arg("nx") = 0, py::arg("ny") = 0, py::arg("nu") = py::none(),
      py::arg("tol") = py::none());

  m.def(
      "run_study",
      [](const std::string& config_text) {
        const StudyConfig cfg = config_from_text(config_text);
        py::gil_scoped_release release;
        auto r = run_study(cfg);
        py::gil_scoped_acquire gil;
        return study_dict(r);
      },
      py::arg("config_text"), "Run a study described by key = value text.");
  m.def(
      "compare_point_rules",
      [](const std::string& config_text) {
        const StudyConfig cfg = config_from_text(config_text);
        std::vector<StudyResult> rs;
        {
          py::gil_scoped_release release;
          rs = compare_point_rules(cfg, cfg.compare_rules);
        }
        py::list out;
        for (const auto& r : rs) out.append(study_dict(r));
        return out;
      },
      py::arg("config_text"));
}
