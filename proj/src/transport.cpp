#include "wagner/transport.hpp"

#include <cmath>
#include <cstdio>

#include "wagner/jets.hpp"

namespace wagner::transport {

namespace {

// Positions and velocities of the curve through one-dimensional jets in t.
class CurveSampler {
 public:
  CurveSampler(const Curve& curve, int n)
      : curve_(curve),
        ctx_(jets::JetContext::create({jets::DirKind::Base}, 1)) {
    if (static_cast<int>(curve.components.size()) != n) {
      throw ConfigError("curve needs " + std::to_string(n) +
                        " coordinate expressions, got " +
                        std::to_string(curve.components.size()));
    }
  }

  void eval(double t, Vec& x, Vec& xdot) const {
    const jets::Jet tj = jets::seed_variable(ctx_, 0, t);
    const std::span<const jets::Jet> env(&tj, 1);
    const std::size_t n = curve_.components.size();
    x.resize(n);
    xdot.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const jets::Jet c = curve_.components[i].evaluate(env);
      x[i] = c.value();
      xdot[i] = c.derivative(0).value();
    }
  }

 private:
  const Curve& curve_;
  std::shared_ptr<const jets::JetContext> ctx_;
};

void validate_span(const Curve& curve) {
  if (!(curve.t1 > curve.t0)) {
    throw ConfigError("curve parameter span must have t1 > t0");
  }
  if (curve.steps < 1) {
    throw ConfigError("curve needs at least one integration step");
  }
}

double defect_of(const chart::Chart& chart, const Vec& x, const Vec& xdot) {
  const int f = chart.fiber_dim();
  double theta = xdot[chart.dim() - 1];
  const Vec gamma = chart.gamma_values(x);
  for (int a = 0; a < f; ++a) theta += gamma[a] * xdot[a];
  return theta;
}

}  // namespace

double admissibility_defect(const chart::Chart& chart, const Curve& curve,
                            double t) {
  CurveSampler sampler(curve, chart.dim());
  Vec x, xdot;
  sampler.eval(t, x, xdot);
  return defect_of(chart, x, xdot);
}

TransportResult transport(const connection::Solver& solver, const Curve& curve,
                          const Vec& v0, Mode mode) {
  const chart::Chart& chart = solver.chart();
  const int n = chart.dim();
  const int f = chart.fiber_dim();
  validate_span(curve);
  if (static_cast<int>(v0.size()) != f) {
    throw ConfigError("transported vector needs " + std::to_string(f) +
                      " components");
  }
  double v0_norm = 0.0;
  for (double c : v0) v0_norm += c * c;
  if (!(v0_norm > 0.0)) {
    throw ConfigError("cannot transport the zero vector");
  }

  CurveSampler sampler(curve, n);
  const double h = (curve.t1 - curve.t0) / curve.steps;

  // Worst admissibility defect over all stage times (step ends + midpoints).
  TransportResult result;
  {
    Vec x, xdot;
    for (int k = 0; k <= 2 * curve.steps; ++k) {
      const double t = curve.t0 + 0.5 * k * h;
      sampler.eval(t, x, xdot);
      const double defect = std::fabs(defect_of(chart, x, xdot));
      if (defect > result.max_defect) {
        result.max_defect = defect;
        result.defect_argmax_t = t;
      }
    }
  }
  if (mode == Mode::Interior && result.max_defect > 1e-8) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "curve is not admissible: defect %.3e at t = %.17g exceeds "
                  "1e-8; use the extended mode for non-admissible curves",
                  result.max_defect, result.defect_argmax_t);
    throw TransportError(buf);
  }

  const connection::Depth depth = mode == Mode::Interior
                                      ? connection::Depth::Spray
                                      : connection::Depth::Schouten;
  Vec x, xdot;
  auto rhs = [&](double t, const Vec& v, Vec& out) {
    sampler.eval(t, x, xdot);
    FiberPoint p{x, v};
    auto ev = solver.evaluate(p, depth);
    out.assign(f, 0.0);
    for (int b = 0; b < f; ++b) {
      double acc = 0.0;
      for (int a = 0; a < f; ++a) acc += ev.G[b][a] * xdot[a];
      out[b] = -acc;
    }
    if (mode == Mode::Extended) {
      const double theta = defect_of(chart, x, xdot);
      for (int b = 0; b < f; ++b) out[b] -= theta * ev.G_n[b];
    }
  };

  auto F_at = [&](double t, const Vec& v) {
    sampler.eval(t, x, xdot);
    Vec env;
    env.reserve(n + f);
    env.insert(env.end(), x.begin(), x.end());
    env.insert(env.end(), v.begin(), v.end());
    return solver.metric().energy().evaluate(std::span<const double>(env));
  };

  Vec v = v0;
  const double F0 = F_at(curve.t0, v);
  if (!(F0 > 0.0)) {
    throw TransportError("initial vector has non-positive energy");
  }

  result.trace.reserve(curve.steps + 1);
  Vec k1(f), k2(f), k3(f), k4(f), tmp(f);
  for (int k = 0; k <= curve.steps; ++k) {
    const double t = curve.t0 + k * h;
    sampler.eval(t, x, xdot);
    TraceRow row;
    row.t = t;
    row.x = x;
    row.v = v;
    row.F = F_at(t, v);
    result.trace.push_back(std::move(row));
    const double drift = std::fabs(result.trace.back().F - F0) / F0;
    result.F_drift = std::max(result.F_drift, drift);
    if (result.trace.back().F < 1e-12 * F0) {
      char buf[128];
      std::snprintf(buf, sizeof buf,
                    "transport aborted at t = %.17g: energy collapsed to "
                    "%.3e of its initial value",
                    t, result.trace.back().F / F0);
      throw TransportError(buf);
    }
    if (k == curve.steps) break;

    const double tm = curve.t0 + (k + 0.5) * h;
    const double tn = curve.t0 + (k + 1.0) * h;
    rhs(t, v, k1);
    for (int b = 0; b < f; ++b) tmp[b] = v[b] + 0.5 * h * k1[b];
    rhs(tm, tmp, k2);
    for (int b = 0; b < f; ++b) tmp[b] = v[b] + 0.5 * h * k2[b];
    rhs(tm, tmp, k3);
    for (int b = 0; b < f; ++b) tmp[b] = v[b] + h * k3[b];
    rhs(tn, tmp, k4);
    for (int b = 0; b < f; ++b) {
      v[b] += (h / 6.0) * (k1[b] + 2.0 * k2[b] + 2.0 * k3[b] + k4[b]);
    }
  }
  return result;
}

std::string trace_csv(const TransportResult& result) {
  std::string out;
  if (result.trace.empty()) return out;
  const std::size_t n = result.trace.front().x.size();
  const std::size_t f = result.trace.front().v.size();
  out += "t";
  char buf[64];
  for (std::size_t i = 1; i <= n; ++i) {
    std::snprintf(buf, sizeof buf, ",x%zu", i);
    out += buf;
  }
  for (std::size_t j = 1; j <= f; ++j) {
    std::snprintf(buf, sizeof buf, ",v%zu", j);
    out += buf;
  }
  out += ",F\n";
  auto num = [&](double value) {
    std::snprintf(buf, sizeof buf, "%.17g", value == 0.0 ? 0.0 : value);
    out += buf;
  };
  for (const TraceRow& row : result.trace) {
    num(row.t);
    for (double c : row.x) {
      out += ',';
      num(c);
    }
    for (double c : row.v) {
      out += ',';
      num(c);
    }
    out += ',';
    num(row.F);
    out += '\n';
  }
  return out;
}

}  // namespace wagner::transport
