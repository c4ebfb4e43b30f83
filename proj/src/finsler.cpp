#include "wagner/finsler.hpp"

#include <cmath>
#include <limits>

#include "wagner/numerics.hpp"

namespace wagner::finsler {

FinslerMetric FinslerMetric::preset(std::string_view name, int m) {
  if (m != 2) {
    throw ConfigError("metric preset '" + std::string(name) +
                      "' is defined for m = 2 only");
  }
  const auto vars = expr::VarSet::fiber_vars(m);
  auto make = [&](const char* text, const char* label) {
    return FinslerMetric(expr::Expr::parse(text, vars), label);
  };
  if (name == "F_EUC") return make("v1^2 + v2^2 + v3^2 + v4^2", "F_EUC");
  if (name == "CURV5")
    return make("exp(2*x2)*v1^2 + v2^2 + v3^2 + v4^2", "CURV5");
  if (name == "WARP5")
    return make("exp(2*x1)*v1^2 + v2^2 + v3^2 + v4^2", "WARP5");
  if (name == "RAND5")
    return make("(sqrt(v1^2 + v2^2 + v3^2 + v4^2) + 0.1*v1)^2", "RAND5");
  throw ConfigError("unknown metric preset '" + std::string(name) + "'");
}

FinslerMetric::FinslerMetric(expr::Expr energy, std::string label,
                             bool is_length)
    : energy_(is_length ? expr::Expr::squared(energy) : std::move(energy)),
      label_(std::move(label)) {}

MetricAtPoint metric_at(const FinslerMetric& fm, const chart::Chart& chart,
                        const FiberPoint& p) {
  const int n = chart.dim();
  const int f = chart.fiber_dim();
  if (static_cast<int>(p.x.size()) != n || static_cast<int>(p.v.size()) != f) {
    throw ConfigError("point has wrong dimensions for this chart");
  }
  // Fiber-only derivatives: base coordinates enter as order-capped seeds so
  // the same variable layout works, but only v-directions are differentiated.
  std::vector<jets::DirKind> kinds(n, jets::DirKind::Base);
  kinds.insert(kinds.end(), f, jets::DirKind::Fiber);
  auto ctx = jets::JetContext::create(kinds, 2);
  std::vector<jets::Jet> env;
  env.reserve(n + f);
  for (int i = 0; i < n; ++i)
    env.push_back(jets::Jet::constant(ctx, p.x[i]));
  for (int j = 0; j < f; ++j)
    env.push_back(jets::seed_variable(ctx, n + j, p.v[j]));
  const jets::Jet F = fm.energy().evaluate(std::span<const jets::Jet>(env));

  MetricAtPoint out;
  out.F_value = F.value();
  out.F_grad_fiber.resize(f);
  out.g_lower = zero_mat(f, f);
  for (int a = 0; a < f; ++a) {
    const jets::Jet Fa = F.derivative(n + a);
    out.F_grad_fiber[a] = Fa.value();
    for (int b = a; b < f; ++b) {
      const double gab = 0.5 * Fa.derivative(n + b).value();
      out.g_lower[a][b] = gab;
      out.g_lower[b][a] = gab;
    }
  }
  if (!numerics::cholesky(out.g_lower)) {
    const double min_eig = numerics::smallest_eigenvalue_sym(out.g_lower);
    throw MetricDegeneracyError(
        "fiber metric not positive definite at " + format_point(p) +
            " (smallest eigenvalue ~ " + std::to_string(min_eig) + ")",
        min_eig);
  }
  out.g_upper = numerics::invert(out.g_lower);
  return out;
}

MetricDiagnostics validate_metric(const FinslerMetric& fm,
                                  const chart::Chart& chart,
                                  std::span<const FiberPoint> points) {
  MetricDiagnostics diag;
  diag.samples.reserve(points.size());
  diag.min_eigenvalue = std::numeric_limits<double>::infinity();
  bool all_ok = true;
  for (const FiberPoint& p : points) {
    MetricDiagnostics::Sample s;
    s.point = p;
    try {
      const MetricAtPoint mp = metric_at(fm, chart, p);
      double contraction = 0.0;
      for (std::size_t a = 0; a < p.v.size(); ++a) {
        contraction += p.v[a] * mp.F_grad_fiber[a];
      }
      s.euler_residual = std::fabs(contraction - 2.0 * mp.F_value) /
                         std::max(1.0, std::fabs(mp.F_value));
      s.min_eigenvalue = numerics::smallest_eigenvalue_sym(mp.g_lower);
      s.positive = mp.F_value > 0.0;
      s.definite = true;
    } catch (const MetricDegeneracyError& e) {
      s.euler_residual = std::numeric_limits<double>::quiet_NaN();
      s.min_eigenvalue = e.min_eigenvalue;
      s.positive = false;
      s.definite = false;
    }
    if (s.definite) {
      diag.max_euler_residual =
          std::max(diag.max_euler_residual, s.euler_residual);
    }
    diag.min_eigenvalue = std::min(diag.min_eigenvalue, s.min_eigenvalue);
    all_ok = all_ok && s.definite && s.positive && s.euler_residual <= 1e-8;
    diag.samples.push_back(std::move(s));
  }
  diag.pass = all_ok && !points.empty();
  return diag;
}

}  // namespace wagner::finsler
