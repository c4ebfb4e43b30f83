#include "wagner/commands.hpp"

#include <algorithm>
#include <cmath>

#include "wagner/curvature.hpp"
#include "wagner/numerics.hpp"
#include "wagner/report.hpp"
#include "wagner/version.hpp"

namespace wagner::commands {

namespace {

using manifest::Manifest;
using report::Value;

constexpr double kMetrizabilityTol = 1e-8;
constexpr double kBracketTol = 1e-6;
constexpr double kFlatTol = 1e-8;
constexpr double kConservationTol = 1e-8;

Value point_echo(const FiberPoint& p) {
  Value v = Value::object();
  v.set("x", Value::of(p.x));
  v.set("v", Value::of(p.v));
  return v;
}

Value base_report(const char* command, const Manifest& mf) {
  Value engine = Value::object();
  engine.set("name", Value::string(kEngineName));
  engine.set("version", Value::string(kEngineVersion));

  Value chart = Value::object();
  chart.set("label", Value::string(mf.chart->label()));
  Value gamma = Value::array();
  for (const auto& g : mf.chart->gamma()) gamma.push(Value::string(g.str()));
  chart.set("gamma", gamma);

  Value metric = Value::object();
  metric.set("label", Value::string(mf.metric->label()));
  metric.set("energy", Value::string(mf.metric->energy().str()));

  Value options = Value::object();
  options.set("sigma", Value::number(mf.options.eq_sigma));
  options.set("omega_inverse_transpose",
              Value::boolean(mf.options.omega_inverse_transpose));
  options.set("fd_step", Value::number(mf.fd_step));
  options.set("seed", Value::integer(static_cast<std::int64_t>(mf.seed)));

  Value inputs = Value::object();
  inputs.set("m", Value::integer(mf.m));
  inputs.set("chart", std::move(chart));
  inputs.set("metric", std::move(metric));
  inputs.set("options", std::move(options));

  Value root = Value::object();
  root.set("engine", std::move(engine));
  root.set("command", Value::string(command));
  root.set("inputs", std::move(inputs));
  return root;
}

double max_abs(const Vec& v) {
  double m = 0.0;
  for (double c : v) m = std::max(m, std::fabs(c));
  return m;
}

std::string safe_filename(const std::string& label) {
  std::string out;
  for (char c : label) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '-' || c == '_';
    out += ok ? c : '_';
  }
  if (out.empty()) out = "curve";
  return out;
}

struct ValidationSummary {
  bool contact_ok = true;
  std::string contact_error;
  double max_reeb_defect = 0.0;
  finsler::MetricDiagnostics metric;
  bool pass() const { return contact_ok && metric.pass; }
};

ValidationSummary run_validation(const Manifest& mf,
                                 const std::vector<FiberPoint>& pts) {
  ValidationSummary s;
  for (const FiberPoint& p : pts) {
    try {
      mf.chart->omega(p.x, mf.options.omega_inverse_transpose);
    } catch (const DegenerateStructureError& e) {
      s.contact_ok = false;
      s.contact_error = e.what();
      break;
    }
    s.max_reeb_defect =
        std::max(s.max_reeb_defect, max_abs(mf.chart->reeb_defect(p.x)));
  }
  s.metric = finsler::validate_metric(*mf.metric, *mf.chart, pts);
  return s;
}

Value validation_value(const ValidationSummary& s) {
  Value chart_checks = Value::object();
  chart_checks.set("contact_rank_ok", Value::boolean(s.contact_ok));
  if (!s.contact_ok) {
    chart_checks.set("error", Value::string(s.contact_error));
  }
  chart_checks.set("max_reeb_defect", Value::number(s.max_reeb_defect));

  Value metric_checks = Value::object();
  metric_checks.set("max_euler_residual",
                    Value::number(s.metric.max_euler_residual));
  metric_checks.set("min_eigenvalue", Value::number(s.metric.min_eigenvalue));
  bool all_positive = true, all_definite = true;
  const finsler::MetricDiagnostics::Sample* worst = nullptr;
  for (const auto& sample : s.metric.samples) {
    all_positive = all_positive && sample.positive;
    all_definite = all_definite && sample.definite;
    if (!worst || sample.euler_residual > worst->euler_residual) {
      worst = &sample;
    }
  }
  metric_checks.set("all_positive", Value::boolean(all_positive));
  metric_checks.set("all_definite", Value::boolean(all_definite));
  if (worst) {
    Value w = point_echo(worst->point);
    w.set("euler_residual", Value::number(worst->euler_residual));
    metric_checks.set("worst_sample", std::move(w));
  }
  metric_checks.set("pass", Value::boolean(s.metric.pass));

  Value out = Value::object();
  out.set("chart", std::move(chart_checks));
  out.set("metric", std::move(metric_checks));
  out.set("pass", Value::boolean(s.pass()));
  return out;
}

}  // namespace

CommandOutput cmd_validate(const Manifest& mf) {
  const auto pts = mf.sampled_points(100);
  if (pts.empty()) {
    throw ConfigError("validate needs points or a sample_box");
  }
  ValidationSummary s = run_validation(mf, pts);

  Value root = base_report("validate", mf);
  root.set("samples", Value::integer(static_cast<std::int64_t>(pts.size())));
  root.set("validation", validation_value(s));
  root.set("pass", Value::boolean(s.pass()));

  CommandOutput out;
  out.report_json = root.serialize();
  out.exit_code = s.pass() ? 0 : 1;
  return out;
}

CommandOutput cmd_eval(const Manifest& mf, bool force) {
  const auto pts = mf.sampled_points(0);
  if (pts.empty()) {
    throw ConfigError("eval needs points or a sample_box");
  }

  Value root = base_report("eval", mf);

  ValidationSummary gate = run_validation(mf, pts);
  if (!gate.pass() && !force) {
    root.set("validation", validation_value(gate));
    root.set("error",
             Value::string("validation failed; re-run with --force to "
                           "evaluate anyway"));
    root.set("pass", Value::boolean(false));
    CommandOutput out;
    out.report_json = root.serialize();
    out.exit_code = 1;
    return out;
  }

  connection::Solver solver(*mf.chart, *mf.metric, mf.options);

  Value order = Value::object();
  order.set("g", Value::string("[lower a][lower b]"));
  order.set("spray", Value::string("[upper c]"));
  order.set("G", Value::string("[upper c][lower a]"));
  order.set("G_vert", Value::string("[upper c][lower a][fiber b]"));
  order.set("K", Value::string("[upper c][lower a][lower b]"));
  order.set("P", Value::string("[upper b][lower a]"));
  order.set("R_hor", Value::string("[upper c][lower a][lower b]"));
  order.set("R_mixed", Value::string("[upper c][lower a]"));
  order.set("omega", Value::string("[lower i][lower j]"));
  order.set("omega_upper", Value::string("[upper i][upper j]"));
  root.set("index_order", std::move(order));

  std::vector<Value> rows(pts.size());
  std::vector<char> ok(pts.size(), 0);
  numerics::parallel_for(pts.size(), [&](std::size_t i) {
    const FiberPoint& p = pts[i];
    Value row = point_echo(p);
    row.set("index", Value::integer(static_cast<std::int64_t>(i)));
    try {
      auto ev = solver.evaluate(p, connection::Depth::Curvature);
      auto curv = curvature::wagner_curvature(solver, p);
      row.set("F", Value::number(ev.F));
      row.set("g", Value::of(ev.g_lower));
      row.set("spray", Value::of(ev.spray));
      row.set("G", Value::of(ev.G));
      row.set("G_vert", Value::of(ev.G_vert));
      row.set("K", Value::of(ev.K));
      row.set("P", Value::of(ev.P));
      row.set("G_n", Value::of(ev.G_n));
      row.set("k_trace", Value::of(ev.k_trace));
      row.set("r_trace", Value::of(curv.r_trace));
      row.set("omega", Value::of(ev.omega_lower));
      row.set("omega_upper", Value::of(ev.omega_upper));
      row.set("R_hor", Value::of(ev.R_hor));
      row.set("R_mixed", Value::of(ev.R_mixed));
      const double met_max = max_abs(ev.metrizability);
      Value residuals = Value::object();
      residuals.set("metrizability", Value::of(ev.metrizability));
      residuals.set("metrizability_max", Value::number(met_max));
      residuals.set("reeb", Value::number(ev.reeb_residual));
      row.set("residuals", std::move(residuals));
      const bool pass = met_max <= kMetrizabilityTol;
      row.set("pass", Value::boolean(pass));
      ok[i] = pass ? 1 : 0;
    } catch (const std::exception& e) {
      row.set("error", Value::string(e.what()));
      row.set("pass", Value::boolean(false));
      ok[i] = 0;
    }
    rows[i] = std::move(row);
  });

  Value points = Value::array();
  for (auto& row : rows) points.push(std::move(row));
  root.set("points", std::move(points));
  const bool pass = std::all_of(ok.begin(), ok.end(), [](char c) { return c; });
  root.set("pass", Value::boolean(pass));

  CommandOutput out;
  out.report_json = root.serialize();
  out.exit_code = pass ? 0 : 1;
  return out;
}

CommandOutput cmd_brackets(const Manifest& mf) {
  const auto pts = mf.sampled_points(0);
  if (pts.empty()) {
    throw ConfigError("brackets needs points or a sample_box");
  }
  connection::Solver solver(*mf.chart, *mf.metric, mf.options);

  Value root = base_report("brackets", mf);

  std::vector<Value> rows(pts.size());
  std::vector<char> ok(pts.size(), 0);
  std::vector<double> maxima(pts.size() * 3, 0.0);
  numerics::parallel_for(pts.size(), [&](std::size_t i) {
    const FiberPoint& p = pts[i];
    Value row = point_echo(p);
    row.set("index", Value::integer(static_cast<std::int64_t>(i)));
    try {
      auto rep = curvature::bracket_oracle_all(solver, p, mf.fd_step);
      Value pairs = Value::array();
      for (const auto& s : rep.samples) {
        Value pair = Value::object();
        pair.set("a", Value::integer(s.a + 1));
        if (s.b == curvature::kReebIndex) {
          pair.set("kind", Value::string("vertical"));
        } else {
          pair.set("b", Value::integer(s.b + 1));
          pair.set("kind", Value::string("horizontal"));
        }
        pair.set("q", Value::number(s.q));
        pair.set("q_expected", Value::number(s.q_expected));
        pair.set("q_residual", Value::number(s.q_residual));
        pair.set("r", Value::of(s.r));
        pair.set("r_expected", Value::of(s.r_expected));
        pair.set("r_deviation", Value::number(s.r_deviation));
        pair.set("max_frame_component", Value::number(s.max_p_abs));
        pairs.push(std::move(pair));
      }
      row.set("brackets", std::move(pairs));
      row.set("max_r_deviation", Value::number(rep.max_r_deviation));
      row.set("max_q_residual", Value::number(rep.max_q_residual));
      row.set("max_frame_component", Value::number(rep.max_p_abs));
      const bool pass = rep.max_r_deviation <= kBracketTol &&
                        rep.max_q_residual <= kBracketTol &&
                        rep.max_p_abs <= kBracketTol;
      row.set("pass", Value::boolean(pass));
      ok[i] = pass ? 1 : 0;
      maxima[3 * i] = rep.max_r_deviation;
      maxima[3 * i + 1] = rep.max_q_residual;
      maxima[3 * i + 2] = rep.max_p_abs;
    } catch (const std::exception& e) {
      row.set("error", Value::string(e.what()));
      row.set("pass", Value::boolean(false));
      ok[i] = 0;
    }
    rows[i] = std::move(row);
  });

  double worst_dev = 0.0, worst_q = 0.0, worst_p = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    worst_dev = std::max(worst_dev, maxima[3 * i]);
    worst_q = std::max(worst_q, maxima[3 * i + 1]);
    worst_p = std::max(worst_p, maxima[3 * i + 2]);
  }
  Value points = Value::array();
  for (auto& row : rows) points.push(std::move(row));
  root.set("points", std::move(points));
  root.set("max_r_deviation", Value::number(worst_dev));
  root.set("max_q_residual", Value::number(worst_q));
  root.set("max_frame_component", Value::number(worst_p));
  root.set("tolerance", Value::number(kBracketTol));
  const bool pass = std::all_of(ok.begin(), ok.end(), [](char c) { return c; });
  root.set("pass", Value::boolean(pass));

  CommandOutput out;
  out.report_json = root.serialize();
  out.exit_code = pass ? 0 : 1;
  return out;
}

CommandOutput cmd_scan(const Manifest& mf) {
  const auto pts = mf.sampled_points(1000);
  if (pts.empty()) {
    throw ConfigError("scan needs points or a sample_box");
  }
  connection::Solver solver(*mf.chart, *mf.metric, mf.options);

  Value root = base_report("scan", mf);
  auto scan = curvature::flatness_scan(solver, pts, kFlatTol);
  root.set("samples", Value::integer(static_cast<std::int64_t>(scan.points)));
  root.set("max_abs_hor", Value::number(scan.max_abs_hor));
  root.set("max_abs_mixed", Value::number(scan.max_abs_mixed));
  root.set("max_abs", Value::number(scan.max_abs));
  root.set("argmax", point_echo(scan.argmax));
  root.set("tolerance", Value::number(scan.tol));
  root.set("classification",
           Value::string(scan.flat ? "flat" : "non-flat"));
  root.set("pass", Value::boolean(true));

  CommandOutput out;
  out.report_json = root.serialize();
  out.exit_code = 0;
  return out;
}

CommandOutput cmd_transport(const Manifest& mf) {
  if (mf.curves.empty()) {
    throw ConfigError("transport needs at least one curve");
  }
  connection::Solver solver(*mf.chart, *mf.metric, mf.options);

  Value root = base_report("transport", mf);
  Value curves = Value::array();
  CommandOutput out;
  bool pass = true;
  for (std::size_t i = 0; i < mf.curves.size(); ++i) {
    const auto& spec = mf.curves[i];
    Value row = Value::object();
    row.set("label", Value::string(spec.label));
    row.set("mode", Value::string(spec.mode == transport::Mode::Interior
                                      ? "interior"
                                      : "extended"));
    Value comps = Value::array();
    for (const auto& c : spec.curve.components) comps.push(Value::string(c.str()));
    row.set("components", std::move(comps));
    Value span = Value::array();
    span.push(Value::number(spec.curve.t0));
    span.push(Value::number(spec.curve.t1));
    row.set("t_span", std::move(span));
    row.set("steps", Value::integer(spec.curve.steps));
    row.set("v0", Value::of(spec.v0));
    try {
      auto result = transport::transport(solver, spec.curve, spec.v0, spec.mode);
      row.set("F0", Value::number(result.trace.front().F));
      row.set("F_drift", Value::number(result.F_drift));
      row.set("max_defect", Value::number(result.max_defect));
      row.set("defect_argmax_t", Value::number(result.defect_argmax_t));
      row.set("v_final", Value::of(result.trace.back().v));
      const bool conserved = result.F_drift <= kConservationTol;
      row.set("f_conserved", Value::boolean(conserved));
      const std::string name =
          safe_filename(spec.label.empty() ? "curve" + std::to_string(i)
                                           : spec.label) +
          ".csv";
      row.set("trace_file", Value::string(name));
      row.set("trace_rows",
              Value::integer(static_cast<std::int64_t>(result.trace.size())));
      out.csv_files.emplace_back(name, transport::trace_csv(result));
      if (spec.mode == transport::Mode::Interior && !conserved) pass = false;
    } catch (const std::exception& e) {
      row.set("error", Value::string(e.what()));
      pass = false;
    }
    curves.push(std::move(row));
  }
  root.set("curves", std::move(curves));
  root.set("conservation_tolerance", Value::number(kConservationTol));
  root.set("pass", Value::boolean(pass));

  out.report_json = root.serialize();
  out.exit_code = pass ? 0 : 1;
  return out;
}

}  // namespace wagner::commands
