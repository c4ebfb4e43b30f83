#include "wagner/curvature.hpp"

#include <cmath>
#include <optional>

namespace wagner::curvature {

namespace {

double max_abs_of(const Tens3& t) {
  double m = 0.0;
  for (const auto& mat : t)
    for (const auto& row : mat)
      for (double v : row) m = std::max(m, std::fabs(v));
  return m;
}

double max_abs_of(const Mat& t) {
  double m = 0.0;
  for (const auto& row : t)
    for (double v : row) m = std::max(m, std::fabs(v));
  return m;
}

// Frame-field data at one total-space point: everything needed to write out
// the components of eps_a = d_a - gamma_a d_n - G^b_a d_{n+b} and
// U = d_n - G^b_n d_{n+b}.
struct FieldData {
  Vec gamma;
  Mat G;
  Vec G_n;
};

// Shared workspace for measuring several brackets at the same base point.
class BracketContext {
 public:
  BracketContext(const connection::Solver& solver, const FiberPoint& p,
                 double fd_step)
      : solver_(solver), n_(solver.chart().dim()), f_(solver.chart().fiber_dim()),
        h_(fd_step) {
    if (!(fd_step > 0.0) || !std::isfinite(fd_step)) {
      throw ConfigError("finite-difference step must be positive and finite");
    }
    if (fd_step < 1e-8) {
      throw ConfigError(
          "finite-difference step underflows double precision after one "
          "halving; use a step >= 1e-8");
    }
    z0_.reserve(n_ + f_);
    z0_.insert(z0_.end(), p.x.begin(), p.x.end());
    z0_.insert(z0_.end(), p.v.begin(), p.v.end());
    center_eval_ = solver_.evaluate(p, connection::Depth::Curvature);
    center_.gamma = solver_.chart().gamma_values(p.x);
    center_.G = center_eval_.G;
    center_.G_n = center_eval_.G_n;
    reeb_defect_ = solver_.chart().reeb_defect(p.x);
    displaced_.resize(static_cast<std::size_t>(f_ + 1) * 4);
  }

  const connection::Evaluation& center() const { return center_eval_; }

  BracketSample measure(int a, int b) {
    if (a < 0 || a >= f_ || (b != kReebIndex && (b < 0 || b >= f_)) || a == b) {
      throw ConfigError("bracket pair indices out of range");
    }
    const int i = a;
    const int j = (b == kReebIndex) ? f_ : b;

    // [X_i, X_j] = D_{X_i} X_j - D_{X_j} X_i, each directional derivative by
    // central differences at steps h and h/2 combined as (4 D(h/2) - D(h))/3.
    Vec beta(n_ + f_, 0.0);
    const Vec dj = direction_derivative(i, j);
    const Vec di = direction_derivative(j, i);
    for (int c = 0; c < n_ + f_; ++c) beta[c] = dj[c] - di[c];
    for (double v : beta) {
      if (!std::isfinite(v)) {
        throw ConfigError("bracket components are not finite at " +
                          std::to_string(h_) + " step");
      }
    }

    // beta = p^c eps_c + q U + r^c d_{n+c}, solved slot by slot.
    BracketSample s;
    s.a = a;
    s.b = b;
    s.p.assign(beta.begin(), beta.begin() + f_);
    double q = beta[n_ - 1];
    for (int c = 0; c < f_; ++c) q += s.p[c] * center_.gamma[c];
    s.q = q;
    s.r.resize(f_);
    for (int c = 0; c < f_; ++c) {
      double r = beta[n_ + c];
      for (int d = 0; d < f_; ++d) r += s.p[d] * center_.G[c][d];
      r += q * center_.G_n[c];
      s.r[c] = r;
    }

    s.r_expected.resize(f_);
    if (b == kReebIndex) {
      s.q_expected = reeb_defect_[a];
      for (int c = 0; c < f_; ++c) s.r_expected[c] = center_eval_.R_mixed[c][a];
    } else {
      s.q_expected = center_eval_.omega_lower[b][a];
      for (int c = 0; c < f_; ++c)
        s.r_expected[c] = center_eval_.R_hor[c][a][b];
    }
    for (double v : s.p) s.max_p_abs = std::max(s.max_p_abs, std::fabs(v));
    s.q_residual = std::fabs(s.q - s.q_expected);
    for (int c = 0; c < f_; ++c) {
      const double dev = std::fabs(s.r[c] - s.r_expected[c]) /
                         std::max(1e-2, std::fabs(s.r_expected[c]));
      s.r_deviation = std::max(s.r_deviation, dev);
    }
    return s;
  }

 private:
  // Components of field k (k < f: eps_k; k == f: U) given its data.
  Vec components(const FieldData& d, int k) const {
    Vec c(n_ + f_, 0.0);
    if (k < f_) {
      c[k] = 1.0;
      c[n_ - 1] = -d.gamma[k];
      for (int b = 0; b < f_; ++b) c[n_ + b] = -d.G[b][k];
    } else {
      c[n_ - 1] = 1.0;
      for (int b = 0; b < f_; ++b) c[n_ + b] = -d.G_n[b];
    }
    return c;
  }

  const FieldData& displaced(int k, int level, int sign) {
    auto& slot = displaced_[(static_cast<std::size_t>(k) * 2 + level) * 2 + sign];
    if (!slot) {
      const double step = (level == 0 ? h_ : 0.5 * h_) * (sign == 0 ? 1.0 : -1.0);
      const Vec dir = components(center_, k);
      FiberPoint q;
      q.x.resize(n_);
      q.v.resize(f_);
      for (int c = 0; c < n_; ++c) q.x[c] = z0_[c] + step * dir[c];
      for (int c = 0; c < f_; ++c) q.v[c] = z0_[n_ + c] + step * dir[n_ + c];
      auto ev = solver_.evaluate(q, connection::Depth::Schouten);
      FieldData d;
      d.gamma = solver_.chart().gamma_values(q.x);
      d.G = std::move(ev.G);
      d.G_n = std::move(ev.G_n);
      slot = std::move(d);
    }
    return *slot;
  }

  // Richardson-extrapolated directional derivative of field `target`'s
  // components along field `along` (both frozen at their center values).
  Vec direction_derivative(int along, int target) {
    Vec out(n_ + f_, 0.0);
    Vec d_h(n_ + f_, 0.0), d_h2(n_ + f_, 0.0);
    for (int level = 0; level < 2; ++level) {
      const double step = level == 0 ? h_ : 0.5 * h_;
      const Vec plus = components(displaced(along, level, 0), target);
      const Vec minus = components(displaced(along, level, 1), target);
      Vec& d = level == 0 ? d_h : d_h2;
      for (int c = 0; c < n_ + f_; ++c)
        d[c] = (plus[c] - minus[c]) / (2.0 * step);
    }
    for (int c = 0; c < n_ + f_; ++c)
      out[c] = (4.0 * d_h2[c] - d_h[c]) / 3.0;
    return out;
  }

  const connection::Solver& solver_;
  int n_, f_;
  double h_;
  Vec z0_;
  connection::Evaluation center_eval_;
  FieldData center_;
  Vec reeb_defect_;
  std::vector<std::optional<FieldData>> displaced_;
};

}  // namespace

CurvatureEvaluation wagner_curvature(const connection::Solver& solver,
                                     const FiberPoint& p) {
  auto ev = solver.evaluate(p, connection::Depth::Curvature);
  const int f = solver.chart().fiber_dim();
  CurvatureEvaluation out;
  out.R_hor = std::move(ev.R_hor);
  out.R_mixed = std::move(ev.R_mixed);
  out.k_trace = std::move(ev.k_trace);
  out.r_trace.assign(f, 0.0);
  for (int c = 0; c < f; ++c) {
    double tr = 0.0;
    for (int a = 0; a < f; ++a)
      for (int b = 0; b < f; ++b) tr += ev.omega_upper[a][b] * out.R_hor[c][a][b];
    out.r_trace[c] = tr;
  }
  out.max_abs = std::max(max_abs_of(out.R_hor), max_abs_of(out.R_mixed));
  return out;
}

Tens3 wagner_horizontal(const connection::Solver& solver, const FiberPoint& p) {
  return solver.evaluate(p, connection::Depth::Schouten).R_hor;
}

Mat wagner_mixed(const connection::Solver& solver, const FiberPoint& p) {
  return solver.evaluate(p, connection::Depth::Curvature).R_mixed;
}

BracketSample lie_bracket_oracle(const connection::Solver& solver,
                                 const FiberPoint& p, int a, int b,
                                 double fd_step) {
  BracketContext ctx(solver, p, fd_step);
  return ctx.measure(a, b);
}

BracketReport bracket_oracle_all(const connection::Solver& solver,
                                 const FiberPoint& p, double fd_step) {
  BracketContext ctx(solver, p, fd_step);
  const int f = solver.chart().fiber_dim();
  BracketReport report;
  for (int a = 0; a < f; ++a)
    for (int b = a + 1; b < f; ++b) report.samples.push_back(ctx.measure(a, b));
  for (int a = 0; a < f; ++a)
    report.samples.push_back(ctx.measure(a, kReebIndex));
  for (const auto& s : report.samples) {
    report.max_p_abs = std::max(report.max_p_abs, s.max_p_abs);
    report.max_q_residual = std::max(report.max_q_residual, s.q_residual);
    report.max_r_deviation = std::max(report.max_r_deviation, s.r_deviation);
  }
  return report;
}

FlatnessScan flatness_scan(const connection::Solver& solver,
                           std::span<const FiberPoint> points, double tol) {
  FlatnessScan scan;
  scan.tol = tol;
  scan.points = points.size();
  for (const FiberPoint& p : points) {
    auto ev = solver.evaluate(p, connection::Depth::Curvature);
    const double hor = max_abs_of(ev.R_hor);
    const double mixed = max_abs_of(ev.R_mixed);
    scan.max_abs_hor = std::max(scan.max_abs_hor, hor);
    scan.max_abs_mixed = std::max(scan.max_abs_mixed, mixed);
    const double both = std::max(hor, mixed);
    if (both > scan.max_abs || scan.argmax.x.empty()) {
      scan.max_abs = both;
      scan.argmax = p;
    }
  }
  scan.flat = scan.points > 0 && scan.max_abs <= tol;
  return scan;
}

}  // namespace wagner::curvature
