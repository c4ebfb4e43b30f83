#pragma once

#include <string>
#include <string_view>

#include "wagner/chart.hpp"
#include "wagner/expr.hpp"
#include "wagner/types.hpp"

namespace wagner::finsler {

// A sub-Finsler energy F(x, v): positive, fiberwise 2-homogeneous, with a
// positive definite fiber Hessian g_ab = F_{.a.b} / 2 on the sampled domain.
class FinslerMetric {
 public:
  // Built-in energies (all for m = 2):
  //   F_EUC  v1^2 + v2^2 + v3^2 + v4^2
  //   CURV5  exp(2 x2) v1^2 + v2^2 + v3^2 + v4^2
  //   WARP5  exp(2 x1) v1^2 + v2^2 + v3^2 + v4^2
  //   RAND5  (sqrt(v1^2 + v2^2 + v3^2 + v4^2) + 0.1 v1)^2
  static FinslerMetric preset(std::string_view name, int m);

  // `is_length` marks an expression that gives the length L rather than the
  // energy; it is squared once at construction.
  FinslerMetric(expr::Expr energy, std::string label, bool is_length = false);

  const expr::Expr& energy() const { return energy_; }
  const std::string& label() const { return label_; }

 private:
  expr::Expr energy_;
  std::string label_;
};

struct MetricAtPoint {
  double F_value = 0.0;
  Vec F_grad_fiber;  // F_{.a}
  Mat g_lower;       // g_ab
  Mat g_upper;       // g^ab
};

// Fiber metric data at one point; throws MetricDegeneracyError (with the
// smallest eigenvalue estimate) if g is not positive definite there.
MetricAtPoint metric_at(const FinslerMetric& fm, const chart::Chart& chart,
                        const FiberPoint& p);

struct MetricDiagnostics {
  struct Sample {
    FiberPoint point;
    double euler_residual;   // |v^a F_{.a} - 2F| / max(1, |F|)
    double min_eigenvalue;   // of g_ab
    bool positive;           // F > 0
    bool definite;           // Cholesky succeeded
  };
  std::vector<Sample> samples;
  double max_euler_residual = 0.0;
  double min_eigenvalue = 0.0;
  bool pass = false;
};

// Homogeneity, positivity and convexity checks over a set of sample points.
// Passes iff every Euler residual is <= 1e-8 and every sample is positive
// with positive definite g.
MetricDiagnostics validate_metric(const FinslerMetric& fm,
                                  const chart::Chart& chart,
                                  std::span<const FiberPoint> points);

}  // namespace wagner::finsler
