// Python bindings for the main operations: connection/curvature evaluation,
// the bracket cross-check, flatness scans, parallel transport, and the
// manifest-driven commands.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "wagner/commands.hpp"
#include "wagner/curvature.hpp"
#include "wagner/manifest.hpp"
#include "wagner/transport.hpp"
#include "wagner/version.hpp"

namespace py = pybind11;

namespace {

using wagner::FiberPoint;
using wagner::Vec;
using wagner::chart::Chart;
using wagner::connection::Depth;
using wagner::connection::Options;
using wagner::connection::Solver;
using wagner::expr::Expr;
using wagner::expr::VarSet;
using wagner::finsler::FinslerMetric;

Depth depth_from_string(const std::string& depth) {
  if (depth == "metric") return Depth::Metric;
  if (depth == "spray") return Depth::Spray;
  if (depth == "schouten") return Depth::Schouten;
  if (depth == "curvature") return Depth::Curvature;
  throw wagner::ConfigError(
      "depth must be one of metric, spray, schouten, curvature");
}

wagner::transport::Mode mode_from_string(const std::string& mode) {
  if (mode == "interior") return wagner::transport::Mode::Interior;
  if (mode == "extended") return wagner::transport::Mode::Extended;
  throw wagner::ConfigError("mode must be interior or extended");
}

Chart make_chart(int m, const std::vector<std::string>& gamma, bool allow_m1) {
  const auto vars = VarSet::chart_vars(m);
  std::vector<Expr> parsed;
  parsed.reserve(gamma.size());
  for (const auto& g : gamma) parsed.push_back(Expr::parse(g, vars));
  return Chart(m, std::move(parsed), allow_m1);
}

FinslerMetric make_metric(const std::string& expression, int m, bool is_length,
                          const std::string& label) {
  return FinslerMetric(Expr::parse(expression, VarSet::fiber_vars(m)), label,
                       is_length);
}

py::dict evaluation_to_dict(const wagner::connection::Evaluation& ev) {
  py::dict out;
  out["order"] = ev.order;
  out["F"] = ev.F;
  out["F_grad"] = ev.F_grad;
  out["g"] = ev.g_lower;
  out["g_upper"] = ev.g_upper;
  if (ev.order >= 3) {
    out["spray"] = ev.spray;
    out["G"] = ev.G;
    out["metrizability"] = ev.metrizability;
  }
  if (ev.order >= 4) {
    out["G_vert"] = ev.G_vert;
    out["K"] = ev.K;
    out["P"] = ev.P;
    out["G_n"] = ev.G_n;
    out["k_trace"] = ev.k_trace;
    out["omega"] = ev.omega_lower;
    out["omega_upper"] = ev.omega_upper;
    out["reeb_residual"] = ev.reeb_residual;
    out["R_hor"] = ev.R_hor;
  }
  if (ev.order >= 5) {
    out["R_mixed"] = ev.R_mixed;
  }
  return out;
}

py::dict run_command(const std::string& command,
                     const std::string& manifest_json, bool force) {
  const auto mf = wagner::manifest::parse_manifest(manifest_json);
  wagner::commands::CommandOutput result;
  if (command == "validate") {
    result = wagner::commands::cmd_validate(mf);
  } else if (command == "eval") {
    result = wagner::commands::cmd_eval(mf, force);
  } else if (command == "brackets") {
    result = wagner::commands::cmd_brackets(mf);
  } else if (command == "scan") {
    result = wagner::commands::cmd_scan(mf);
  } else if (command == "transport") {
    result = wagner::commands::cmd_transport(mf);
  } else {
    throw wagner::ConfigError(
        "command must be one of validate, eval, brackets, scan, transport");
  }
  py::dict csv;
  for (const auto& [name, bytes] : result.csv_files) {
    csv[py::str(name)] = py::bytes(bytes);
  }
  py::dict out;
  out["report_json"] = result.report_json;
  out["csv"] = std::move(csv);
  out["exit_code"] = result.exit_code;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Truncated metric connections, Wagner-type curvature and parallel "
      "transport for contact sub-Finsler structures.";
  m.attr("__version__") = wagner::kEngineVersion;

  py::register_exception<wagner::ConfigError>(m, "ConfigError",
                                              PyExc_ValueError);
  py::register_exception<wagner::DegenerateStructureError>(
      m, "DegenerateStructureError", PyExc_RuntimeError);
  py::register_exception<wagner::MetricDegeneracyError>(
      m, "MetricDegeneracyError", PyExc_RuntimeError);
  py::register_exception<wagner::transport::TransportError>(
      m, "TransportError", PyExc_RuntimeError);

  py::class_<Chart>(m, "Chart",
                    "Adapted chart of a contact structure, given by the 2m "
                    "frame coefficients gamma_a(x).")
      .def(py::init(&make_chart), py::arg("m"), py::arg("gamma"),
           py::arg("allow_m1") = false)
      .def_static("preset", &Chart::preset, py::arg("name"))
      .def_property_readonly("m", &Chart::m)
      .def_property_readonly("dim", &Chart::dim)
      .def_property_readonly("label", &Chart::label)
      .def_property_readonly("gamma",
                             [](const Chart& c) {
                               std::vector<std::string> out;
                               for (const auto& g : c.gamma())
                                 out.push_back(g.str());
                               return out;
                             })
      .def(
          "omega",
          [](const Chart& c, const Vec& x, bool inverse_transpose) {
            const auto w = c.omega(x, inverse_transpose);
            py::dict out;
            out["lower"] = w.lower;
            out["upper"] = w.upper;
            return out;
          },
          py::arg("x"), py::arg("inverse_transpose") = false,
          "Fundamental 2-form and its raised version at x.")
      .def("reeb_defect", &Chart::reeb_defect, py::arg("x"));

  py::class_<FinslerMetric>(m, "Metric",
                            "Sub-Finsler energy F(x, v), fiberwise "
                            "2-homogeneous and positive definite.")
      .def(py::init(&make_metric), py::arg("expression"), py::arg("m") = 2,
           py::arg("is_length") = false, py::arg("label") = "custom")
      .def_static("preset", &FinslerMetric::preset, py::arg("name"),
                  py::arg("m") = 2)
      .def_property_readonly("label", &FinslerMetric::label)
      .def_property_readonly(
          "energy", [](const FinslerMetric& f) { return f.energy().str(); });

  py::class_<Solver>(m, "Solver",
                     "Evaluator of the truncated metric connection and its "
                     "curvature for one chart/metric pair.")
      .def(py::init([](const Chart& chart, const FinslerMetric& metric,
                       double sigma, bool omega_inverse_transpose) {
             Options opt;
             opt.eq_sigma = sigma;
             opt.omega_inverse_transpose = omega_inverse_transpose;
             return Solver(chart, metric, opt);
           }),
           py::arg("chart"), py::arg("metric"), py::arg("sigma") = 1.0,
           py::arg("omega_inverse_transpose") = false)
      .def(
          "evaluate",
          [](const Solver& s, const Vec& x, const Vec& v,
             const std::string& depth) {
            return evaluation_to_dict(
                s.evaluate({x, v}, depth_from_string(depth)));
          },
          py::arg("x"), py::arg("v"), py::arg("depth") = "curvature",
          "All tensors of the connection at one point, as nested lists.")
      .def(
          "brackets",
          [](const Solver& s, const Vec& x, const Vec& v, double fd_step) {
            const auto rep =
                wagner::curvature::bracket_oracle_all(s, {x, v}, fd_step);
            py::list samples;
            for (const auto& b : rep.samples) {
              py::dict row;
              row["a"] = b.a;
              row["b"] = b.b;  // -1 selects the extended vertical field
              row["q"] = b.q;
              row["q_expected"] = b.q_expected;
              row["r"] = b.r;
              row["r_expected"] = b.r_expected;
              row["r_deviation"] = b.r_deviation;
              samples.append(std::move(row));
            }
            py::dict out;
            out["max_frame_component"] = rep.max_p_abs;
            out["max_q_residual"] = rep.max_q_residual;
            out["max_r_deviation"] = rep.max_r_deviation;
            out["samples"] = std::move(samples);
            return out;
          },
          py::arg("x"), py::arg("v"), py::arg("fd_step") = 1e-4,
          "Finite-difference Lie brackets of the frame fields compared "
          "against the assembled curvature.")
      .def(
          "flatness",
          [](const Solver& s,
             const std::vector<std::pair<Vec, Vec>>& points, double tol) {
            std::vector<FiberPoint> pts;
            pts.reserve(points.size());
            for (const auto& [x, v] : points) pts.push_back({x, v});
            const auto scan = wagner::curvature::flatness_scan(s, pts, tol);
            py::dict out;
            out["points"] = scan.points;
            out["max_abs_hor"] = scan.max_abs_hor;
            out["max_abs_mixed"] = scan.max_abs_mixed;
            out["max_abs"] = scan.max_abs;
            out["argmax_x"] = scan.argmax.x;
            out["argmax_v"] = scan.argmax.v;
            out["flat"] = scan.flat;
            return out;
          },
          py::arg("points"), py::arg("tol") = 1e-8,
          "Classify the structure as flat or non-flat over sample points.")
      .def(
          "transport",
          [](const Solver& s, const std::vector<std::string>& components,
             double t0, double t1, int steps, const Vec& v0,
             const std::string& mode, bool with_trace) {
            wagner::transport::Curve curve;
            const auto vars = VarSet::curve_vars();
            for (const auto& c : components)
              curve.components.push_back(Expr::parse(c, vars));
            curve.t0 = t0;
            curve.t1 = t1;
            curve.steps = steps;
            const auto res = wagner::transport::transport(
                s, curve, v0, mode_from_string(mode));
            py::dict out;
            out["v_final"] = res.trace.back().v;
            out["F_final"] = res.trace.back().F;
            out["F_drift"] = res.F_drift;
            out["max_defect"] = res.max_defect;
            out["defect_argmax_t"] = res.defect_argmax_t;
            if (with_trace) {
              py::list trace;
              for (const auto& row : res.trace) {
                py::dict r;
                r["t"] = row.t;
                r["x"] = row.x;
                r["v"] = row.v;
                r["F"] = row.F;
                trace.append(std::move(r));
              }
              out["trace"] = std::move(trace);
            }
            return out;
          },
          py::arg("components"), py::arg("t0"), py::arg("t1"),
          py::arg("steps"), py::arg("v0"), py::arg("mode") = "interior",
          py::arg("with_trace") = false,
          "Parallel transport of v0 along a parametrized curve.");

  m.def("run", &run_command, py::arg("command"), py::arg("manifest_json"),
        py::arg("force") = false,
        "Run a manifest-driven command (validate, eval, brackets, scan, "
        "transport); returns report_json, csv files and the exit code.");
}
