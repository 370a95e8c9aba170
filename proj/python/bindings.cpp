// Python bindings: analytic engine, fringe analysis, grid oracle and runs.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ghostsim/analysis.hpp"
#include "ghostsim/config.hpp"
#include "ghostsim/engine.hpp"
#include "ghostsim/errors.hpp"
#include "ghostsim/grid.hpp"
#include "ghostsim/run.hpp"

namespace py = pybind11;
using namespace ghostsim;

namespace {

Axis axis_from(const py::array_t<double, py::array::c_style | py::array::forcecast>& y) {
  if (y.ndim() != 1 || y.size() < 2) throw AnalysisError("axis must be a 1D array with at least 2 samples");
  const auto n = static_cast<std::size_t>(y.size());
  const Axis ax{y.at(0), y.at(n - 1), n};
  ax.validate();
  const double tol = 1e-6 * ax.step();
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(y.at(static_cast<py::ssize_t>(i)) - ax[i]) > tol)
      throw AnalysisError("axis must be uniformly spaced");
  return ax;
}

Pattern pattern_from(const py::array_t<double>& y, const py::array_t<double, py::array::c_style | py::array::forcecast>& v) {
  Pattern p;
  p.x = axis_from(y);
  if (v.ndim() != 1 || static_cast<std::size_t>(v.size()) != p.x.count)
    throw AnalysisError("values must be a 1D array matching the axis");
  p.values.assign(v.data(), v.data() + v.size());
  return p;
}

py::array_t<double> to_array(const std::vector<double>& v) { return py::array_t<double>(v.size(), v.data()); }

py::tuple as_arrays(const Pattern& p) {
  if (!p.is_2d()) return py::make_tuple(to_array(p.x.values()), to_array(p.values));
  py::array_t<double> grid({p.x.count, p.y->count});
  std::copy(p.values.begin(), p.values.end(), grid.mutable_data());
  return py::make_tuple(to_array(p.x.values()), to_array(p.y->values()), grid);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Two-color ghost interference simulator";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<PhysicsError>(m, "PhysicsError", base.ptr());
  py::register_exception<ResourceError>(m, "ResourceError", base.ptr());
  py::register_exception<AnalysisError>(m, "AnalysisError", base.ptr());

  py::class_<Scenario>(m, "Scenario")
      .def(py::init([](double lambda1, double lambda2, double L1, double L2, double d, double epsilon,
                       double ell_sigma, double omega, std::optional<double> f) {
             Scenario s{};
             s.lambda1 = lambda1;
             s.lambda2 = lambda2;
             s.L1 = L1;
             s.L2 = L2;
             s.slit_separation = d;
             s.slit_width = epsilon;
             s.source = {ell_sigma, omega};
             if (f) s.lens = Lens{*f};
             s.validate();
             return s;
           }),
           py::kw_only(), py::arg("lambda1"), py::arg("lambda2"), py::arg("L1"), py::arg("L2"), py::arg("d"),
           py::arg("epsilon"), py::arg("ell_sigma"), py::arg("omega"), py::arg("f") = py::none())
      .def_readwrite("lambda1", &Scenario::lambda1)
      .def_readwrite("lambda2", &Scenario::lambda2)
      .def_readwrite("L1", &Scenario::L1)
      .def_readwrite("L2", &Scenario::L2)
      .def_readwrite("d", &Scenario::slit_separation)
      .def_readwrite("epsilon", &Scenario::slit_width)
      .def_property(
          "ell_sigma", [](const Scenario& s) { return s.source.ell_sigma; },
          [](Scenario& s, double v) { s.source.ell_sigma = v; })
      .def_property(
          "omega", [](const Scenario& s) { return s.source.omega; }, [](Scenario& s, double v) { s.source.omega = v; })
      .def_property(
          "f",
          [](const Scenario& s) -> std::optional<double> {
            return s.lens ? std::optional<double>(s.lens->focal_length) : std::nullopt;
          },
          [](Scenario& s, std::optional<double> f) {
            if (f) s.lens = Lens{*f};
            else s.lens.reset();
          })
      .def_property_readonly("D", &Scenario::D)
      .def_property_readonly("gamma", &Scenario::gamma)
      .def("issues", [](const Scenario& s) { return s.issues(); })
      .def("validate", &Scenario::validate);

  m.def("ding_fig3", &ding_fig3, "Two-color reference scenario: 1530 nm / 780 nm, L1 = 1.15 m, L2 = 0.325 m, d = 0.5 mm");

  py::class_<FringeWidths>(m, "FringeWidths")
      .def_readonly("exact", &FringeWidths::exact)
      .def_readonly("simplified", &FringeWidths::simplified)
      .def_readonly("young_equivalent", &FringeWidths::young_equivalent);
  m.def("fringe_width", &fringe_width);

  py::class_<Uncertainties>(m, "Uncertainties").def_readonly("dy", &Uncertainties::dy).def_readonly("dk", &Uncertainties::dk);
  m.def("uncertainties", &uncertainties);

  py::class_<JointDensity>(m, "JointDensity")
      .def_readonly("theta1", &JointDensity::theta1)
      .def_readonly("theta2", &JointDensity::theta2)
      .def_readonly("phase_offset", &JointDensity::phase_offset)
      .def_property_readonly("y0_prime", [](const JointDensity& jd) { return jd.slit.y0_prime; })
      .def_property_readonly("gamma", [](const JointDensity& jd) { return jd.slit.gamma.value(); })
      .def_property_readonly("pass_probability", [](const JointDensity& jd) { return jd.slit.pass_probability; })
      .def("__call__",
           [](const JointDensity& jd, py::array_t<double> y1, py::array_t<double> y2) {
             return py::vectorize([&jd](double a, double b) { return jd(a, b); })(y1, y2);
           })
      .def("marginal1", [](const JointDensity& jd, py::array_t<double> y1) {
        return py::vectorize([&jd](double a) { return jd.marginal1(a); })(y1);
      });
  m.def("joint_density", &joint_density);
  m.def("default_y2_half_width", &default_y2_half_width);

  m.def(
      "coincidence_slice",
      [](const JointDensity& jd, double y1, const py::array_t<double>& y2) {
        return to_array(coincidence_slice(jd, y1, axis_from(y2)).values);
      },
      py::arg("jd"), py::arg("y1"), py::arg("y2"), "Density along y2 with particle 1 fixed at y1");
  m.def(
      "bucket_average",
      [](const JointDensity& jd, double y1_center, double width, const py::array_t<double>& y2) {
        return to_array(bucket_average(jd, y1_center, width, axis_from(y2)).values);
      },
      py::arg("jd"), py::arg("y1_center"), py::arg("width"), py::arg("y2"));
  m.def(
      "marginal_particle1",
      [](const JointDensity& jd, const py::array_t<double>& y1) {
        return to_array(marginal_particle1(jd, axis_from(y1)).values);
      },
      py::arg("jd"), py::arg("y1"));

  py::class_<FringeReport>(m, "FringeReport")
      .def_readonly("spacing", &FringeReport::spacing)
      .def_readonly("uncertainty", &FringeReport::uncertainty)
      .def_readonly("visibility", &FringeReport::visibility)
      .def_readonly("envelope_width", &FringeReport::envelope_width)
      .def_readonly("envelope_center", &FringeReport::envelope_center)
      .def_readonly("phase", &FringeReport::phase)
      .def_readonly("n_fringes_used", &FringeReport::n_fringes_used)
      .def_readonly("spacing_spectral", &FringeReport::spacing_spectral)
      .def_readonly("spacing_peaks", &FringeReport::spacing_peaks)
      .def_readonly("methods_disagree", &FringeReport::methods_disagree)
      .def_property_readonly("method", [](const FringeReport& r) { return to_string(r.method); });
  m.def(
      "extract_fringes", [](const py::array_t<double>& y, const py::array_t<double>& v) {
        return extract_fringes(pattern_from(y, v));
      },
      py::arg("y"), py::arg("values"));
  m.def(
      "visibility_at", [](const py::array_t<double>& y, const py::array_t<double>& v, double spacing) {
        return visibility_at(pattern_from(y, v), spacing);
      },
      py::arg("y"), py::arg("values"), py::arg("spacing"));
  m.def(
      "visibility_vs_bucket",
      [](const JointDensity& jd, const std::vector<double>& widths, const py::array_t<double>& y2, double y1_center) {
        const BucketTable t = visibility_vs_bucket(jd, widths, axis_from(y2), y1_center);
        std::vector<std::pair<double, double>> rows;
        for (const auto& r : t.rows) rows.emplace_back(r.width, r.visibility);
        return py::make_tuple(rows, t.monotone);
      },
      py::arg("jd"), py::arg("widths"), py::arg("y2"), py::arg("y1_center") = 0.0,
      "Returns ([(width, visibility), ...], monotone)");

  py::class_<OracleRun>(m, "OracleRun")
      .def_readonly("passed", &OracleRun::passed)
      .def_readonly("norm_drift", &OracleRun::norm_drift)
      .def_property_readonly("joint", [](const OracleRun& r) { return as_arrays(r.joint); })
      .def_property_readonly("norm_history", [](const OracleRun& r) {
        std::vector<std::pair<std::string, double>> out;
        for (const auto& n : r.norm_history) out.emplace_back(n.stage, n.norm);
        return out;
      });
  m.def(
      "run_oracle",
      [](const Scenario& s, std::size_t n1, std::size_t n2) {
        const GridSpec spec = preflight(s, n1, n2);
        py::gil_scoped_release release;
        return run_oracle(s, spec);
      },
      py::arg("scenario"), py::arg("n1") = 2048, py::arg("n2") = 2048,
      "Grid split-step pipeline on the smallest grid preflight accepts at n1 x n2");

  m.def("preset_yaml", [](const std::string& name) { return serialize_config(preset(name)); });
  m.def(
      "run",
      [](const std::string& yaml_text, std::optional<std::string> output_dir, bool check) {
        RunConfig c = parse_config(yaml_text);
        if (output_dir) c.output_dir = *output_dir;
        ensure_grid(c);
        RunOptions opt;
        opt.check = check;
        RunResult r;
        {
          py::gil_scoped_release release;
          r = run(c, opt);
        }
        py::dict out;
        out["exit_code"] = r.exit_code;
        out["files"] = r.files;
        out["report"] = r.report;
        out["warnings"] = r.warnings;
        out["norm_drift"] = r.norm_drift;
        if (r.comparison) out["max_abs_dev"] = r.comparison->max_abs_dev;
        return out;
      },
      py::arg("config_yaml"), py::arg("output_dir") = py::none(), py::arg("check") = false,
      "Run a YAML configuration; returns the exit code, written files and the report");
}
