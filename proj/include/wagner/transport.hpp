#pragma once

#include <string>
#include <vector>

#include "wagner/connection.hpp"
#include "wagner/expr.hpp"
#include "wagner/types.hpp"

namespace wagner::transport {

// A parametrized curve in the chart: 2m+1 expressions of t, evaluated (with
// velocities) through one-dimensional jets at exact stage times.
struct Curve {
  std::vector<expr::Expr> components;
  double t0 = 0.0;
  double t1 = 1.0;
  int steps = 1000;  // fixed integration steps; step count is user data
};

enum class Mode {
  Interior,  // transport along admissible curves, v' = -G(x,v) u
  Extended,  // arbitrary curves, v' = -G(x,v) u - Theta G_n(x,v)
};

// Transport left the domain where F is smooth and positive (the carried
// vector collapsed toward the fiber origin), or the curve is unusable.
class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TraceRow {
  double t = 0.0;
  Vec x;
  Vec v;
  double F = 0.0;
};

struct TransportResult {
  std::vector<TraceRow> trace;  // steps+1 rows, strictly increasing t
  double F_drift = 0.0;         // max |F - F(t0)| / F(t0)
  double max_defect = 0.0;      // max admissibility defect over stage times
  double defect_argmax_t = 0.0;
};

// Theta(t) = x_n'(t) + gamma_a(x(t)) x_a'(t); zero iff the curve velocity is
// admissible (tangent to the distribution) at t.
double admissibility_defect(const chart::Chart& chart, const Curve& curve,
                            double t);

// Classical fixed-step 4th-order transport of v0 along the curve. Interior
// mode refuses curves whose worst admissibility defect exceeds 1e-8
// (reporting the defect and where it happens); either mode aborts if F
// collapses below 1e-12 of its initial value.
TransportResult transport(const connection::Solver& solver, const Curve& curve,
                          const Vec& v0, Mode mode);

// CSV rendering of a trace: `t,x1,...,xn,v1,...,v2m,F`, 17 significant
// digits throughout.
std::string trace_csv(const TransportResult& result);

}  // namespace wagner::transport
