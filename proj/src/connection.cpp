#include "wagner/connection.hpp"

#include <cmath>

#include "wagner/numerics.hpp"

namespace wagner::connection {

using jets::Jet;

namespace {

using JetMat = std::vector<std::vector<Jet>>;

double jet_abs_value(const Jet& j) { return std::fabs(j.value()); }

}  // namespace

Solver::Solver(chart::Chart chart, finsler::FinslerMetric metric,
               Options options)
    : chart_(std::move(chart)),
      metric_(std::move(metric)),
      options_(options) {
  const int n = chart_.dim();
  const int f = chart_.fiber_dim();
  std::vector<jets::DirKind> kinds(n, jets::DirKind::Base);
  kinds.insert(kinds.end(), f, jets::DirKind::Fiber);
  for (int order = static_cast<int>(Depth::Metric);
       order <= static_cast<int>(Depth::Curvature); ++order) {
    contexts_[order] = jets::JetContext::create(kinds, order);
  }
}

Evaluation Solver::evaluate(const FiberPoint& p, Depth depth) const {
  const int n = chart_.dim();
  const int f = chart_.fiber_dim();
  const int order = static_cast<int>(depth);
  if (static_cast<int>(p.x.size()) != n || static_cast<int>(p.v.size()) != f) {
    throw ConfigError("point has wrong dimensions for this chart");
  }

  const auto& ctx = contexts_[order];
  std::vector<Jet> env;
  env.reserve(n + f);
  for (int i = 0; i < n; ++i) env.push_back(jets::seed_variable(ctx, i, p.x[i]));
  for (int j = 0; j < f; ++j)
    env.push_back(jets::seed_variable(ctx, n + j, p.v[j]));

  const Jet F = metric_.energy().evaluate(std::span<const Jet>(env));
  std::vector<Jet> gamma;
  gamma.reserve(f);
  for (int a = 0; a < f; ++a) {
    gamma.push_back(chart_.gamma()[a].evaluate(
        std::span<const Jet>(env.data(), static_cast<std::size_t>(n))));
  }

  // Frame derivative on functions of (x, v): e_a = d_a - gamma_a d_n, acting
  // only through the base slots.
  auto e_of = [&](const Jet& h, int a) {
    return h.derivative(a) - gamma[a] * h.derivative(n - 1);
  };
  auto fib = [&](const Jet& h, int b) { return h.derivative(n + b); };

  Evaluation out;
  out.order = order;
  out.F = F.value();

  // --- fiber metric -------------------------------------------------------
  std::vector<Jet> Fd;
  Fd.reserve(f);
  for (int b = 0; b < f; ++b) Fd.push_back(fib(F, b));
  out.F_grad.resize(f);
  for (int b = 0; b < f; ++b) out.F_grad[b] = Fd[b].value();

  JetMat g(f), g_up;
  for (int a = 0; a < f; ++a) {
    g[a].reserve(f);
    for (int b = 0; b < f; ++b) g[a].push_back(0.5 * fib(Fd[a], b));
  }
  out.g_lower = zero_mat(f, f);
  for (int a = 0; a < f; ++a)
    for (int b = 0; b < f; ++b) out.g_lower[a][b] = g[a][b].value();
  if (!numerics::cholesky(out.g_lower)) {
    const double min_eig = numerics::smallest_eigenvalue_sym(out.g_lower);
    throw MetricDegeneracyError(
        "fiber metric not positive definite at " + format_point(p) +
            " (smallest eigenvalue ~ " + std::to_string(min_eig) + ")",
        min_eig);
  }
  g_up = numerics::invert(g, jet_abs_value);
  out.g_upper = zero_mat(f, f);
  for (int a = 0; a < f; ++a)
    for (int b = 0; b < f; ++b) out.g_upper[a][b] = g_up[a][b].value();
  if (order < static_cast<int>(Depth::Spray)) return out;

  // --- spray and interior coefficients ------------------------------------
  // S^c = g^{bc} (v^a e_a F_{.b} - e_b F) / 2.
  std::vector<Jet> S;
  S.reserve(f);
  {
    std::vector<Jet> inner;
    inner.reserve(f);
    for (int b = 0; b < f; ++b) {
      Jet acc = -e_of(F, b);
      for (int a = 0; a < f; ++a) acc += env[n + a] * e_of(Fd[b], a);
      inner.push_back(std::move(acc));
    }
    for (int c = 0; c < f; ++c) {
      Jet acc = g_up[0][c] * inner[0];
      for (int b = 1; b < f; ++b) acc += g_up[b][c] * inner[b];
      S.push_back(0.5 * acc);
    }
  }
  out.spray.resize(f);
  for (int c = 0; c < f; ++c) out.spray[c] = S[c].value();

  JetMat G(f);
  for (int c = 0; c < f; ++c) {
    G[c].reserve(f);
    for (int d = 0; d < f; ++d) G[c].push_back(0.5 * fib(S[c], d));
  }
  out.G = zero_mat(f, f);
  for (int c = 0; c < f; ++c)
    for (int d = 0; d < f; ++d) out.G[c][d] = G[c][d].value();

  out.metrizability.resize(f);
  for (int a = 0; a < f; ++a) {
    Jet r = e_of(F, a);
    for (int c = 0; c < f; ++c) r -= G[c][a] * Fd[c];
    out.metrizability[a] = r.value();
  }
  if (order < static_cast<int>(Depth::Schouten)) return out;

  // --- vertical derivatives, Schouten tensors -----------------------------
  std::vector<JetMat> Gv(f, JetMat(f));  // Gv[c][d][b] = G^c_{d.b}
  for (int c = 0; c < f; ++c)
    for (int d = 0; d < f; ++d) {
      Gv[c][d].reserve(f);
      for (int b = 0; b < f; ++b) Gv[c][d].push_back(fib(G[c][d], b));
    }
  out.G_vert = zero_tens3(f, f, f);
  for (int c = 0; c < f; ++c)
    for (int d = 0; d < f; ++d)
      for (int b = 0; b < f; ++b) out.G_vert[c][d][b] = Gv[c][d][b].value();

  // K^c_{ab}: the fiber part of the bracket of horizontal frame fields,
  //   K^c_{ab} = e_b G^c_a - e_a G^c_b + G^d_a G^c_{b.d} - G^d_b G^c_{a.d},
  // antisymmetric in (a, b) by construction.
  std::vector<JetMat> K(f, JetMat(f, std::vector<Jet>(f)));
  for (int c = 0; c < f; ++c) {
    for (int a = 0; a < f; ++a) {
      K[c][a][a] = Jet::constant(ctx, 0.0);
      for (int b = a + 1; b < f; ++b) {
        Jet acc = e_of(G[c][a], b) - e_of(G[c][b], a);
        for (int d = 0; d < f; ++d) {
          acc += G[d][a] * Gv[c][b][d] - G[d][b] * Gv[c][a][d];
        }
        K[c][a][b] = acc;
        K[c][b][a] = -acc;
      }
    }
  }
  out.K = zero_tens3(f, f, f);
  for (int c = 0; c < f; ++c)
    for (int a = 0; a < f; ++a)
      for (int b = 0; b < f; ++b) out.K[c][a][b] = K[c][a][b].value();

  out.P = zero_mat(f, f);
  for (int b = 0; b < f; ++b)
    for (int a = 0; a < f; ++a) out.P[b][a] = G[b][a].derivative(n - 1).value();

  // --- fundamental 2-form and extension coefficients ----------------------
  JetMat w(f, std::vector<Jet>(f)), w_up;
  for (int i = 0; i < f; ++i) {
    w[i][i] = Jet::constant(ctx, 0.0);
    for (int j = i + 1; j < f; ++j) {
      Jet acc = e_of(gamma[j], i) - e_of(gamma[i], j);
      w[i][j] = acc;
      w[j][i] = -acc;
    }
  }
  try {
    w_up = numerics::invert(w, jet_abs_value);
  } catch (const numerics::SingularMatrixError&) {
    throw DegenerateStructureError(
        "contact structure degenerates (fundamental 2-form rank < 2m) at " +
        format_point(p));
  }
  if (options_.omega_inverse_transpose) {
    JetMat t(f, std::vector<Jet>(f));
    for (int i = 0; i < f; ++i)
      for (int j = 0; j < f; ++j) t[i][j] = w_up[j][i];
    w_up = std::move(t);
  }
  out.omega_lower = zero_mat(f, f);
  out.omega_upper = zero_mat(f, f);
  for (int i = 0; i < f; ++i)
    for (int j = 0; j < f; ++j) {
      out.omega_lower[i][j] = w[i][j].value();
      out.omega_upper[i][j] = w_up[i][j].value();
    }

  // G_n^c = sigma * w^{ba} K^c_{ab}.
  std::vector<Jet> Gn;
  Gn.reserve(f);
  out.k_trace.resize(f);
  out.G_n.resize(f);
  for (int c = 0; c < f; ++c) {
    Jet acc = Jet::constant(ctx, 0.0);
    for (int a = 0; a < f; ++a)
      for (int b = 0; b < f; ++b) acc += w_up[b][a] * K[c][a][b];
    out.k_trace[c] = acc.value();
    Gn.push_back(options_.eq_sigma * acc);
    out.G_n[c] = Gn[c].value();
  }

  {
    Jet r = F.derivative(n - 1);
    for (int c = 0; c < f; ++c) r -= Gn[c] * Fd[c];
    out.reeb_residual = r.value();
  }

  // R_hor^c_{ab} = K^c_{ab} + w_{ba} G_n^c: the fiber part of the horizontal
  // bracket after splitting off its w_{ba} U component.
  out.R_hor = zero_tens3(f, f, f);
  for (int c = 0; c < f; ++c)
    for (int a = 0; a < f; ++a)
      for (int b = 0; b < f; ++b) {
        out.R_hor[c][a][b] = out.K[c][a][b] + out.omega_lower[b][a] * out.G_n[c];
      }
  if (order < static_cast<int>(Depth::Curvature)) return out;

  // --- mixed curvature -----------------------------------------------------
  // R_mixed^c_a = P^c_a - eps_a G^c_n - G^b_n G^c_{a.b} + (d_n gamma_a) G^c_n
  // with eps_a t = e_a t - G^b_a t_{.b}; this is the fiber part of the
  // bracket of the horizontal frame with the extended vertical field, after
  // splitting off its (d_n gamma_a) U component.
  out.R_mixed = zero_mat(f, f);
  for (int a = 0; a < f; ++a) {
    const double dn_gamma_a = gamma[a].derivative(n - 1).value();
    for (int c = 0; c < f; ++c) {
      Jet eps = e_of(Gn[c], a);
      for (int b = 0; b < f; ++b) eps -= G[b][a] * fib(Gn[c], b);
      double val = out.P[c][a] - eps.value() + dn_gamma_a * out.G_n[c];
      for (int b = 0; b < f; ++b) val -= out.G_n[b] * out.G_vert[c][a][b];
      out.R_mixed[c][a] = val;
    }
  }
  return out;
}

Vec Solver::spray(const FiberPoint& p) const {
  return evaluate(p, Depth::Spray).spray;
}

std::pair<Mat, Tens3> Solver::interior_coefficients(const FiberPoint& p) const {
  Evaluation e = evaluate(p, Depth::Schouten);
  return {std::move(e.G), std::move(e.G_vert)};
}

Vec Solver::metrizability_residual(const FiberPoint& p) const {
  return evaluate(p, Depth::Spray).metrizability;
}

std::pair<Tens3, Mat> Solver::schouten_tensors(const FiberPoint& p) const {
  Evaluation e = evaluate(p, Depth::Schouten);
  return {std::move(e.K), std::move(e.P)};
}

Vec Solver::extension_coefficients(const FiberPoint& p) const {
  return evaluate(p, Depth::Schouten).G_n;
}

double Solver::reeb_metrizability_residual(const FiberPoint& p) const {
  return evaluate(p, Depth::Schouten).reeb_residual;
}

Mat riemannian_reduction_oracle(const finsler::FinslerMetric& fm,
                                const chart::Chart& chart,
                                const FiberPoint& p) {
  const int n = chart.dim();
  const int f = chart.fiber_dim();
  if (static_cast<int>(p.x.size()) != n || static_cast<int>(p.v.size()) != f) {
    throw ConfigError("point has wrong dimensions for this chart");
  }

  // Quadratic detection: the fiber Hessian must not depend on v. Probe it at
  // a few deterministic velocities and compare.
  auto hessian_at = [&](const Vec& v) {
    FiberPoint q{p.x, v};
    return finsler::metric_at(fm, chart, q).g_lower;
  };
  const Mat g_ref = hessian_at(p.v);
  Vec probe(f, 0.0);
  for (int d = 0; d < f; ++d) probe[d] = 0.7 + 0.3 * d;
  Vec probe2(f, 0.0);
  for (int d = 0; d < f; ++d) probe2[d] = (d % 2 ? -1.1 : 0.9) + 0.05 * d;
  for (const Vec& v : {probe, probe2}) {
    const Mat g_other = hessian_at(v);
    for (int a = 0; a < f; ++a)
      for (int b = 0; b < f; ++b) {
        const double scale =
            std::max({1.0, std::fabs(g_ref[a][b]), std::fabs(g_other[a][b])});
        if (std::fabs(g_other[a][b] - g_ref[a][b]) > 1e-9 * scale) {
          throw ConfigError(
              "reduction oracle is only applicable to energies quadratic in "
              "v; the fiber Hessian varies with v for metric '" +
              fm.label() + "'");
        }
      }
  }

  // Frame Christoffel symbols of g(x) at p.x; base-only jets, with the fiber
  // values frozen at a fixed reference velocity.
  std::vector<jets::DirKind> kinds(n, jets::DirKind::Base);
  kinds.insert(kinds.end(), f, jets::DirKind::Fiber);
  auto ctx = jets::JetContext::create(kinds, 3);
  std::vector<Jet> env;
  env.reserve(n + f);
  for (int i = 0; i < n; ++i) env.push_back(jets::seed_variable(ctx, i, p.x[i]));
  for (int j = 0; j < f; ++j)
    env.push_back(jets::seed_variable(ctx, n + j, p.v[j]));
  const Jet F = fm.energy().evaluate(std::span<const Jet>(env));
  std::vector<Jet> gamma;
  for (int a = 0; a < f; ++a) {
    gamma.push_back(chart.gamma()[a].evaluate(
        std::span<const Jet>(env.data(), static_cast<std::size_t>(n))));
  }
  auto e_of = [&](const Jet& h, int a) {
    return h.derivative(a) - gamma[a] * h.derivative(n - 1);
  };

  JetMat g(f);
  for (int a = 0; a < f; ++a) {
    g[a].reserve(f);
    for (int b = 0; b < f; ++b)
      g[a].push_back(0.5 * F.derivative(n + a).derivative(n + b));
  }
  const JetMat g_up = numerics::invert(g, jet_abs_value);

  Mat result = zero_mat(f, f);
  for (int c = 0; c < f; ++c) {
    for (int a = 0; a < f; ++a) {
      double acc = 0.0;
      for (int b = 0; b < f; ++b) {
        // C^c_{ab} = g^{cd} (e_a g_bd + e_b g_ad - e_d g_ab) / 2
        double chris = 0.0;
        for (int d = 0; d < f; ++d) {
          const double t = e_of(g[b][d], a).value() + e_of(g[a][d], b).value() -
                           e_of(g[a][b], d).value();
          chris += 0.5 * g_up[c][d].value() * t;
        }
        acc += chris * p.v[b];
      }
      result[c][a] = acc;
    }
  }
  return result;
}

}  // namespace wagner::connection
