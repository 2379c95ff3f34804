#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "lrlab/app/config.hpp"
#include "lrlab/app/report.hpp"
#include "lrlab/app/runner.hpp"
#include "lrlab/bump.hpp"
#include "lrlab/carleman.hpp"
#include "lrlab/error.hpp"
#include "lrlab/fields.hpp"
#include "lrlab/grid.hpp"

namespace py = pybind11;
using namespace lrlab;

namespace {

py::object json_to_py(const nlohmann::ordered_json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

Point to_point(const std::vector<double>& v, int dim, const char* what) {
  if (static_cast<int>(v.size()) != dim)
    fail(ErrorCode::InvalidArgument, std::string(what) + " must have " + std::to_string(dim) + " entries");
  Point p{};
  for (int i = 0; i < dim; ++i) p[i] = v[i];
  return p;
}

std::vector<py::ssize_t> shape_of(const SpacetimeGrid& g) {
  std::vector<py::ssize_t> s;
  for (int a = 0; a < g.dim(); ++a) s.push_back(g.shape(a));
  return s;
}

py::array_t<double> to_array(const ScalarField& f) {
  py::array_t<double> out(shape_of(f.grid()));
  std::copy(f.vec().begin(), f.vec().end(), out.mutable_data());
  return out;
}

app::ExperimentConfig config_from(const py::object& cfg) {
  if (py::isinstance<py::dict>(cfg)) {
    const std::string text = py::module_::import("json").attr("dumps")(cfg).cast<std::string>();
    return app::parse_config(text);
  }
  return app::load_config(cfg.cast<std::filesystem::path>());
}

py::dict sweep_to_dict(const SweepSeries& s) {
  py::dict d;
  d["h"] = s.h;
  d["ratio"] = s.ratio;
  d["term_names"] = s.term_names;
  d["terms"] = s.terms;
  d["max_growth"] = s.max_growth;
  return d;
}

}  // namespace

PYBIND11_MODULE(_lrlab, m) {
  m.doc() = "Light-ray transform and boundary-rigidity laboratory";

  static py::exception<Error> error_type(m, "LrlabError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error_type.ptr())(e.what());
      exc.attr("code") = std::string(to_string(e.code()));
      exc.attr("exit_code") = app::exit_code_for(e.code());
      PyErr_SetObject(error_type.ptr(), exc.ptr());
    }
  });

  m.def("version", &app::version);

  py::enum_<BumpKind>(m, "BumpKind")
      .value("Smooth", BumpKind::Smooth)
      .value("GaussianTruncated", BumpKind::GaussianTruncated)
      .value("Polynomial", BumpKind::Polynomial);

  py::class_<SpacetimeGrid>(m, "Grid")
      .def_static("cube", &SpacetimeGrid::cube, py::arg("n_spatial"), py::arg("T"), py::arg("lo"), py::arg("hi"),
                  py::arg("n_t"), py::arg("n_x"))
      .def_property_readonly("n_spatial", &SpacetimeGrid::n_spatial)
      .def_property_readonly("dim", &SpacetimeGrid::dim)
      .def_property_readonly("T", &SpacetimeGrid::T)
      .def_property_readonly("size", &SpacetimeGrid::size)
      .def_property_readonly("shape", [](const SpacetimeGrid& g) { return shape_of(g); })
      .def("coords", [](const SpacetimeGrid& g, int axis) {
        if (axis < 0 || axis >= g.dim()) fail(ErrorCode::InvalidArgument, "axis out of range");
        std::vector<double> c(g.shape(axis));
        for (int i = 0; i < g.shape(axis); ++i) c[i] = g.coord(axis, i);
        return c;
      });

  m.def(
      "sample_bumps",
      [](const SpacetimeGrid& g, const std::vector<py::dict>& bumps) {
        std::vector<BumpSpec> specs;
        for (const auto& b : bumps) {
          BumpSpec s;
          s.center = to_point(b["center"].cast<std::vector<double>>(), g.dim(), "center");
          s.radii = to_point(b["radii"].cast<std::vector<double>>(), g.dim(), "radii");
          s.amplitude = b.contains("amplitude") ? b["amplitude"].cast<double>() : 1.0;
          s.kind = b.contains("kind") ? bump_kind_from_string(b["kind"].cast<std::string>()) : BumpKind::Smooth;
          specs.push_back(s);
        }
        return to_array(make_bumps(specs, g));
      },
      py::arg("grid"), py::arg("bumps"),
      "Samples a sum of compact bumps, each a dict with center, radii, amplitude and kind.");

  m.def(
      "carleman_sweep",
      [](const std::string& mode, int s, std::vector<double> hs, int n_x, double eps) {
        if (mode != "boundary" && mode != "interior")
          fail(ErrorCode::InvalidArgument, "mode must be \"boundary\" or \"interior\"");
        const auto w = default_carleman_direction();
        py::list out;
        for (const auto& c : default_carleman_family(n_x)) {
          SweepSeries series;
          {
            py::gil_scoped_release release;
            series = mode == "boundary" ? boundary_sweep(c.A, c.q, c.u, w, eps, hs)
                                        : interior_sweep(c.A, c.q, c.u, w, eps, hs, s);
          }
          py::dict d = sweep_to_dict(series);
          d["label"] = c.label;
          d["amplitude"] = c.amplitude;
          out.append(d);
        }
        return out;
      },
      py::arg("mode") = "interior", py::arg("s") = 0,
      py::arg("hs") = std::vector<double>{0.2, 0.1, 0.05, 0.025}, py::arg("n_x") = 41, py::arg("eps") = 0.5,
      "Carleman h-sweep over the default test family; one dict per case.");

  m.def(
      "validate",
      [](const py::object& cfg) {
        const auto c = config_from(cfg);
        app::validate(c);
        return c.scenarios.size();
      },
      py::arg("config"), "Validates a config given as a path or a dict; returns the scenario count.");

  m.def(
      "run",
      [](const py::object& cfg, const std::filesystem::path& out, int threads, bool deterministic) {
        const auto c = config_from(cfg);
        app::RunOptions opt;
        opt.out_dir = out;
        opt.threads = threads;
        opt.deterministic = deterministic;
        opt.quiet = true;
        if (!py::isinstance<py::dict>(cfg)) opt.config_path = cfg.cast<std::filesystem::path>().string();
        app::RunOutcome outcome;
        {
          py::gil_scoped_release release;
          outcome = app::run(c, opt);
        }
        py::dict d;
        d["exit_code"] = outcome.exit_code;
        py::list reports;
        for (const auto& r : outcome.reports) reports.append(json_to_py(app::to_json(r)));
        d["reports"] = reports;
        return d;
      },
      py::arg("config"), py::arg("out"), py::arg("threads") = 0, py::arg("deterministic") = false,
      "Runs every scenario and writes the artifact directory; returns the exit code and report dicts.");

  m.def(
      "export",
      [](const std::filesystem::path& dir, const std::string& format) {
        std::vector<std::string> paths;
        for (const auto& p : app::export_reports(dir, app::export_format_from_string(format)))
          paths.push_back(p.string());
        return paths;
      },
      py::arg("dir"), py::arg("format") = "csv");
}
