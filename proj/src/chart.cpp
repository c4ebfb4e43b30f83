#include "wagner/chart.hpp"

#include <cmath>
#include <cstdio>

#include "wagner/numerics.hpp"

namespace wagner {

std::string format_point(const FiberPoint& p) {
  std::string out = "x=(";
  char buf[32];
  for (std::size_t i = 0; i < p.x.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.6g", p.x[i]);
    out += (i ? "," : "") + std::string(buf);
  }
  out += "), v=(";
  for (std::size_t i = 0; i < p.v.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.6g", p.v[i]);
    out += (i ? "," : "") + std::string(buf);
  }
  out += ")";
  return out;
}

}  // namespace wagner

namespace wagner::chart {

Chart Chart::preset(std::string_view name) {
  if (name == "HEIS5") {
    const auto vars = expr::VarSet::chart_vars(2);
    std::vector<expr::Expr> gamma;
    gamma.push_back(expr::Expr::parse("-x2", vars));
    gamma.push_back(expr::Expr::parse("0", vars));
    gamma.push_back(expr::Expr::parse("-x4", vars));
    gamma.push_back(expr::Expr::parse("0", vars));
    Chart c(2, std::move(gamma));
    c.label_ = "HEIS5";
    return c;
  }
  throw ConfigError("unknown chart preset '" + std::string(name) + "'");
}

Chart::Chart(int m, std::vector<expr::Expr> gamma, bool allow_m1) : m_(m) {
  if (m < 1) {
    throw ConfigError("chart needs m >= 1, got m = " + std::to_string(m));
  }
  if (m == 1 && !allow_m1) {
    throw ConfigError(
        "m = 1 is outside the supported range (the engine targets m >= 2); "
        "pass allow_m1 to experiment anyway");
  }
  if (static_cast<int>(gamma.size()) != 2 * m) {
    throw ConfigError("chart needs exactly 2m frame coefficients, got " +
                      std::to_string(gamma.size()));
  }
  gamma_ = std::move(gamma);
}

double Chart::gamma_value(int a, const Vec& x) const {
  if (a < 0 || a >= fiber_dim()) throw ConfigError("frame index out of range");
  if (static_cast<int>(x.size()) != dim()) {
    throw ConfigError("base point has wrong dimension");
  }
  return gamma_[a].evaluate(std::span<const double>(x));
}

Vec Chart::gamma_values(const Vec& x) const {
  Vec out(fiber_dim());
  for (int a = 0; a < fiber_dim(); ++a) out[a] = gamma_value(a, x);
  return out;
}

double Chart::frame_derivative(const expr::Expr& f, int a, const Vec& x,
                               const Vec* v) const {
  const int n = dim();
  const int fdim = fiber_dim();
  if (a < 0 || a >= fdim) throw ConfigError("frame index out of range");
  if (static_cast<int>(x.size()) != n) {
    throw ConfigError("base point has wrong dimension");
  }
  // One shared context: base directions for x, fiber directions for v (the
  // latter seeded only so f may mention velocities).
  std::vector<jets::DirKind> kinds(n, jets::DirKind::Base);
  kinds.insert(kinds.end(), fdim, jets::DirKind::Fiber);
  auto ctx = jets::JetContext::create(kinds, 1);
  std::vector<jets::Jet> env;
  env.reserve(n + fdim);
  for (int i = 0; i < n; ++i) env.push_back(jets::seed_variable(ctx, i, x[i]));
  for (int j = 0; j < fdim; ++j) {
    const double vj = v ? (*v)[j] : 0.0;
    env.push_back(jets::seed_variable(ctx, n + j, vj));
  }
  const jets::Jet fj = f.evaluate(std::span<const jets::Jet>(env));
  std::vector<jets::Jet> gj;
  gj.reserve(fdim);
  for (int b = 0; b < fdim; ++b) {
    gj.push_back(gamma_[b].evaluate(std::span<const jets::Jet>(env.data(), n)));
  }
  return frame_derivative(fj, gj, a).value();
}

jets::Jet Chart::frame_derivative(const jets::Jet& f,
                                  std::span<const jets::Jet> gamma_jets,
                                  int a) const {
  const int n = dim();
  if (a < 0 || a >= fiber_dim()) throw ConfigError("frame index out of range");
  return f.derivative(a) - gamma_jets[a] * f.derivative(n - 1);
}

Chart::Omega Chart::omega(const Vec& x, bool inverse_transpose) const {
  const int n = dim();
  const int fdim = fiber_dim();
  if (static_cast<int>(x.size()) != n) {
    throw ConfigError("base point has wrong dimension");
  }
  std::vector<jets::DirKind> kinds(n, jets::DirKind::Base);
  auto ctx = jets::JetContext::create(kinds, 1);
  std::vector<jets::Jet> env;
  env.reserve(n);
  for (int i = 0; i < n; ++i) env.push_back(jets::seed_variable(ctx, i, x[i]));
  std::vector<jets::Jet> gj;
  gj.reserve(fdim);
  for (int b = 0; b < fdim; ++b) {
    gj.push_back(gamma_[b].evaluate(std::span<const jets::Jet>(env)));
  }

  Omega out;
  out.lower = zero_mat(fdim, fdim);
  // w_ij = e_i gamma_j - e_j gamma_i, the d_n-component of [e_j, e_i].
  auto e_of = [&](const jets::Jet& h, int a) {
    return h.derivative(a).value() -
           gj[a].value() * h.derivative(n - 1).value();
  };
  for (int i = 0; i < fdim; ++i) {
    for (int j = i + 1; j < fdim; ++j) {
      const double w = e_of(gj[j], i) - e_of(gj[i], j);
      out.lower[i][j] = w;
      out.lower[j][i] = -w;
    }
  }

  try {
    out.upper = numerics::invert(out.lower);
  } catch (const numerics::SingularMatrixError&) {
    FiberPoint p{x, {}};
    throw DegenerateStructureError(
        "contact structure degenerates (fundamental 2-form rank < 2m) at " +
        format_point(p));
  }
  if (inverse_transpose) {
    Mat t = zero_mat(fdim, fdim);
    for (int i = 0; i < fdim; ++i)
      for (int j = 0; j < fdim; ++j) t[i][j] = out.upper[j][i];
    out.upper = std::move(t);
  }
  return out;
}

Vec Chart::reeb_defect(const Vec& x) const {
  const int n = dim();
  if (static_cast<int>(x.size()) != n) {
    throw ConfigError("base point has wrong dimension");
  }
  std::vector<jets::DirKind> kinds(n, jets::DirKind::Base);
  auto ctx = jets::JetContext::create(kinds, 1);
  std::vector<jets::Jet> env;
  for (int i = 0; i < n; ++i) env.push_back(jets::seed_variable(ctx, i, x[i]));
  Vec out(fiber_dim());
  for (int a = 0; a < fiber_dim(); ++a) {
    out[a] = gamma_[a]
                 .evaluate(std::span<const jets::Jet>(env))
                 .derivative(n - 1)
                 .value();
  }
  return out;
}

Vec AdaptedTransition::apply(const Vec& x) const {
  const std::size_t f = A.size();
  if (x.size() != f + 1) {
    throw ConfigError("transition applied to a point of wrong dimension");
  }
  Vec out(f + 1);
  for (std::size_t i = 0; i < f; ++i) {
    double s = b[i];
    for (std::size_t j = 0; j < f; ++j) s += A[i][j] * x[j];
    out[i] = s;
  }
  out[f] = x[f] + c;
  return out;
}

Mat AdaptedTransition::inverse_A() const { return numerics::invert(A); }

std::vector<double> pushforward_admissible(const std::vector<double>& components,
                                           int p, int q,
                                           const AdaptedTransition& tr) {
  const int f = static_cast<int>(tr.A.size());
  const int slots = p + q;
  std::size_t expected = 1;
  for (int s = 0; s < slots; ++s) expected *= f;
  if (components.size() != expected) {
    throw ConfigError("tensor component count does not match (p, q) and 2m");
  }
  if (slots == 0) return components;
  const Mat inv = tr.inverse_A();

  // One slot at a time: contract the s-th index with A (upper slots) or with
  // A^{-1} on the right (lower slots).
  std::vector<double> cur = components;
  std::vector<double> next(expected);
  std::size_t stride = expected / f;  // stride of the leading slot
  for (int s = 0; s < slots; ++s) {
    const bool upper = s < p;
    std::fill(next.begin(), next.end(), 0.0);
    // Index layout: prefix (slots before s), slot s, suffix (slots after s).
    const std::size_t inner = stride;           // combined size of the suffix
    const std::size_t outer = expected / (inner * f);
    for (std::size_t o = 0; o < outer; ++o) {
      for (int newi = 0; newi < f; ++newi) {
        for (int oldi = 0; oldi < f; ++oldi) {
          const double w = upper ? tr.A[newi][oldi] : inv[oldi][newi];
          if (w == 0.0) continue;
          const std::size_t src = (o * f + oldi) * inner;
          const std::size_t dst = (o * f + newi) * inner;
          for (std::size_t in = 0; in < inner; ++in) {
            next[dst + in] += w * cur[src + in];
          }
        }
      }
    }
    cur.swap(next);
    stride /= f;
  }
  return cur;
}

}  // namespace wagner::chart
