#include "wagner/manifest.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace wagner::manifest {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ConfigError("manifest." + where + ": " + what);
}

double as_number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

Vec as_vec(const json& j, std::size_t size, const std::string& where) {
  if (!j.is_array() || j.size() != size) {
    fail(where, "expected an array of " + std::to_string(size) + " numbers");
  }
  Vec out;
  out.reserve(size);
  for (std::size_t i = 0; i < size; ++i) {
    out.push_back(as_number(j[i], where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

expr::Expr parse_expr(const json& j, const expr::VarSet& vars,
                      const std::string& where) {
  if (!j.is_string()) fail(where, "expected an expression string");
  try {
    return expr::Expr::parse(j.get<std::string>(), vars);
  } catch (const expr::ParseError& e) {
    fail(where, e.what());
  }
}

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& where) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : allowed) {
      if (item.key() == k) {
        known = true;
        break;
      }
    }
    if (!known) fail(where, "unknown key '" + item.key() + "'");
  }
}

FiberPoint as_point(const json& j, int m, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object with 'x' and 'v'");
  check_keys(j, {"x", "v"}, where);
  if (!j.contains("x") || !j.contains("v")) fail(where, "needs 'x' and 'v'");
  FiberPoint p;
  p.x = as_vec(j["x"], static_cast<std::size_t>(2 * m + 1), where + ".x");
  p.v = as_vec(j["v"], static_cast<std::size_t>(2 * m), where + ".v");
  double norm = 0.0;
  for (double c : p.v) norm += c * c;
  if (!(norm > 0.0)) fail(where + ".v", "velocity must be nonzero");
  return p;
}

void parse_chart(Manifest& mf, const json& j) {
  if (j.is_string()) {
    mf.chart = chart::Chart::preset(j.get<std::string>());
    if (mf.chart->m() != mf.m) {
      fail("chart", "preset '" + j.get<std::string>() + "' has m = " +
                        std::to_string(mf.chart->m()) + ", manifest says m = " +
                        std::to_string(mf.m));
    }
    return;
  }
  if (!j.is_object()) fail("chart", "expected a preset name or an object");
  check_keys(j, {"gamma", "allow_m1"}, "chart");
  if (!j.contains("gamma") || !j["gamma"].is_array()) {
    fail("chart", "needs a 'gamma' array of 2m expressions");
  }
  const bool allow_m1 =
      j.contains("allow_m1") && j["allow_m1"].is_boolean() && j["allow_m1"].get<bool>();
  const auto vars = expr::VarSet::chart_vars(mf.m);
  std::vector<expr::Expr> gamma;
  for (std::size_t i = 0; i < j["gamma"].size(); ++i) {
    gamma.push_back(
        parse_expr(j["gamma"][i], vars, "chart.gamma[" + std::to_string(i) + "]"));
  }
  try {
    mf.chart.emplace(mf.m, std::move(gamma), allow_m1);
  } catch (const ConfigError& e) {
    fail("chart", e.what());
  }
}

void parse_metric(Manifest& mf, const json& j) {
  if (j.is_string()) {
    try {
      mf.metric = finsler::FinslerMetric::preset(j.get<std::string>(), mf.m);
    } catch (const ConfigError& e) {
      fail("metric", e.what());
    }
    return;
  }
  if (!j.is_object()) fail("metric", "expected a preset name or an object");
  check_keys(j, {"expression", "is_length", "label"}, "metric");
  if (!j.contains("expression")) fail("metric", "needs 'expression'");
  const bool is_length = j.contains("is_length") && j["is_length"].is_boolean() &&
                         j["is_length"].get<bool>();
  std::string label = "custom";
  if (j.contains("label")) {
    if (!j["label"].is_string()) fail("metric.label", "expected a string");
    label = j["label"].get<std::string>();
  }
  auto e = parse_expr(j["expression"], expr::VarSet::fiber_vars(mf.m),
                      "metric.expression");
  mf.metric.emplace(std::move(e), std::move(label), is_length);
}

void parse_options(Manifest& mf, const json& j) {
  if (!j.is_object()) fail("options", "expected an object");
  check_keys(j, {"sigma", "omega_inverse_transpose", "fd_step", "seed"},
             "options");
  if (j.contains("sigma")) {
    mf.options.eq_sigma = as_number(j["sigma"], "options.sigma");
    if (!(mf.options.eq_sigma > 0.0)) {
      fail("options.sigma", "must be positive");
    }
  }
  if (j.contains("omega_inverse_transpose")) {
    if (!j["omega_inverse_transpose"].is_boolean()) {
      fail("options.omega_inverse_transpose", "expected a boolean");
    }
    mf.options.omega_inverse_transpose = j["omega_inverse_transpose"].get<bool>();
  }
  if (j.contains("fd_step")) {
    mf.fd_step = as_number(j["fd_step"], "options.fd_step");
    if (!(mf.fd_step > 0.0) || !std::isfinite(mf.fd_step)) {
      fail("options.fd_step", "must be positive and finite");
    }
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_integer() ||
        (!j["seed"].is_number_unsigned() && j["seed"].get<std::int64_t>() < 0)) {
      fail("options.seed", "expected a non-negative integer");
    }
    mf.seed = j["seed"].get<std::uint64_t>();
  }
}

void parse_curves(Manifest& mf, const json& j) {
  if (!j.is_array()) fail("curves", "expected an array");
  const auto vars = expr::VarSet::curve_vars();
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string where = "curves[" + std::to_string(i) + "]";
    const json& c = j[i];
    if (!c.is_object()) fail(where, "expected an object");
    check_keys(c, {"components", "t_span", "steps", "v0", "mode", "label"},
               where);
    CurveSpec spec;
    if (!c.contains("components") || !c["components"].is_array() ||
        c["components"].size() != static_cast<std::size_t>(2 * mf.m + 1)) {
      fail(where, "needs a 'components' array of 2m+1 expressions");
    }
    for (std::size_t k = 0; k < c["components"].size(); ++k) {
      spec.curve.components.push_back(parse_expr(
          c["components"][k], vars,
          where + ".components[" + std::to_string(k) + "]"));
    }
    if (!c.contains("t_span")) fail(where, "needs 't_span'");
    const Vec span = as_vec(c["t_span"], 2, where + ".t_span");
    spec.curve.t0 = span[0];
    spec.curve.t1 = span[1];
    if (!(spec.curve.t1 > spec.curve.t0)) {
      fail(where + ".t_span", "needs t1 > t0");
    }
    if (c.contains("steps")) {
      if (!c["steps"].is_number_integer() || c["steps"].get<std::int64_t>() < 1) {
        fail(where + ".steps", "expected a positive integer");
      }
      spec.curve.steps = c["steps"].get<int>();
    }
    if (!c.contains("v0")) fail(where, "needs 'v0'");
    spec.v0 = as_vec(c["v0"], static_cast<std::size_t>(2 * mf.m), where + ".v0");
    double norm = 0.0;
    for (double x : spec.v0) norm += x * x;
    if (!(norm > 0.0)) fail(where + ".v0", "must be nonzero");
    if (c.contains("mode")) {
      if (!c["mode"].is_string()) fail(where + ".mode", "expected a string");
      const std::string mode = c["mode"].get<std::string>();
      if (mode == "interior") {
        spec.mode = transport::Mode::Interior;
      } else if (mode == "extended") {
        spec.mode = transport::Mode::Extended;
      } else {
        fail(where + ".mode", "expected 'interior' or 'extended'");
      }
    }
    spec.label = "curve" + std::to_string(i);
    if (c.contains("label")) {
      if (!c["label"].is_string()) fail(where + ".label", "expected a string");
      spec.label = c["label"].get<std::string>();
    }
    mf.curves.push_back(std::move(spec));
  }
}

void parse_box(Manifest& mf, const json& j) {
  if (!j.is_object()) fail("sample_box", "expected an object");
  check_keys(j, {"x_min", "x_max", "v_norm", "count"}, "sample_box");
  sampling::SampleBox box;
  const std::size_t n = static_cast<std::size_t>(2 * mf.m + 1);
  if (!j.contains("x_min") || !j.contains("x_max")) {
    fail("sample_box", "needs 'x_min' and 'x_max'");
  }
  box.x_min = as_vec(j["x_min"], n, "sample_box.x_min");
  box.x_max = as_vec(j["x_max"], n, "sample_box.x_max");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(box.x_min[i] <= box.x_max[i])) {
      fail("sample_box", "x_min must be <= x_max componentwise");
    }
  }
  if (j.contains("v_norm")) {
    const Vec vn = as_vec(j["v_norm"], 2, "sample_box.v_norm");
    if (!(vn[0] > 0.0) || !(vn[1] >= vn[0])) {
      fail("sample_box.v_norm", "needs 0 < lo <= hi");
    }
    box.v_norm_min = vn[0];
    box.v_norm_max = vn[1];
  }
  if (!j.contains("count") || !j["count"].is_number_integer() ||
      j["count"].get<std::int64_t>() < 1) {
    fail("sample_box.count", "expected a positive integer");
  }
  mf.sample_count = j["count"].get<std::size_t>();
  mf.box = box;
}

}  // namespace

std::vector<FiberPoint> Manifest::sampled_points(
    std::size_t fallback_count) const {
  std::vector<FiberPoint> out = points;
  if (box) {
    auto extra = sampling::sample_fiber_points(*box, m, sample_count, seed);
    out.insert(out.end(), extra.begin(), extra.end());
  } else if (fallback_count > 0) {
    auto extra = sampling::sample_fiber_points(sampling::unit_box(m), m,
                                               fallback_count, seed);
    out.insert(out.end(), extra.begin(), extra.end());
  }
  return out;
}

Manifest parse_manifest(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("manifest is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("manifest: expected a JSON object");
  check_keys(j,
             {"m", "chart", "metric", "options", "points", "curves",
              "sample_box"},
             "(top level)");

  Manifest mf;
  if (j.contains("m")) {
    if (!j["m"].is_number_integer() || j["m"].get<std::int64_t>() < 1) {
      fail("m", "expected an integer >= 1");
    }
    mf.m = j["m"].get<int>();
  }
  if (!j.contains("chart")) fail("chart", "required");
  parse_chart(mf, j["chart"]);
  if (!j.contains("metric")) fail("metric", "required");
  parse_metric(mf, j["metric"]);
  if (j.contains("options")) parse_options(mf, j["options"]);
  if (j.contains("points")) {
    if (!j["points"].is_array()) fail("points", "expected an array");
    for (std::size_t i = 0; i < j["points"].size(); ++i) {
      mf.points.push_back(
          as_point(j["points"][i], mf.m, "points[" + std::to_string(i) + "]"));
    }
  }
  if (j.contains("curves")) parse_curves(mf, j["curves"]);
  if (j.contains("sample_box")) parse_box(mf, j["sample_box"]);
  return mf;
}

Manifest load_manifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open manifest file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_manifest(buf.str());
}

}  // namespace wagner::manifest
