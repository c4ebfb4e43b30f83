#pragma once

#include <array>
#include <memory>

#include "wagner/chart.hpp"
#include "wagner/finsler.hpp"
#include "wagner/types.hpp"

namespace wagner::connection {

struct Options {
  // Normalization of the extension coefficients G_n = sigma * w^{ba} K_ab.
  double eq_sigma = 1.0;
  // Use the transposed inverse convention for the raised 2-form.
  bool omega_inverse_transpose = false;
};

// How deep an evaluation goes; each level includes the previous ones. The
// level fixes the jet truncation order, which is exactly the highest total
// derivative of F the level consumes.
enum class Depth : int {
  Metric = 2,      // g, fiber gradient
  Spray = 3,       // spray, interior coefficients, metrizability residuals
  Schouten = 4,    // vertical derivatives, K, P, extension, horizontal R
  Curvature = 5,   // mixed curvature (one more derivative through G_n)
};

struct Evaluation {
  int order = 0;  // depth actually computed

  // Depth::Metric
  double F = 0.0;
  Vec F_grad;          // F_{.a}
  Mat g_lower, g_upper;

  // Depth::Spray
  Vec spray;           // S^c
  Mat G;               // G[c][d] = G^c_d
  Vec metrizability;   // e_a F - G^c_a F_{.c}

  // Depth::Schouten
  Tens3 G_vert;        // G_vert[c][d][b] = G^c_{d.b}
  Tens3 K;             // K[c][a][b] = K^c_{ab}
  Mat P;               // P[b][a] = d_n G^b_a
  Vec G_n;             // G_n[c] = sigma * w^{ba} K^c_{ab}
  Vec k_trace;         // w^{ba} K^c_{ab} (unscaled contraction)
  Mat omega_lower, omega_upper;
  double reeb_residual = 0.0;  // d_n F - G^c_n F_{.c} (diagnostic only)
  Tens3 R_hor;         // R_hor[c][a][b] = K^c_{ab} + w_{ba} G_n^c

  // Depth::Curvature
  Mat R_mixed;         // R_mixed[c][a], the d_{n+c}-component of [eps_a, U]
                       // with the w_{ba} U part split off
};

// The unique fiberwise interior connection that is symmetric in the vertical
// derivative and parallelizes F, evaluated pointwise through one truncated
// jet computation per point. Immutable and safe to share across threads.
class Solver {
 public:
  Solver(chart::Chart chart, finsler::FinslerMetric metric, Options options = {});

  const chart::Chart& chart() const { return chart_; }
  const finsler::FinslerMetric& metric() const { return metric_; }
  const Options& options() const { return options_; }

  Evaluation evaluate(const FiberPoint& p, Depth depth) const;

  // Narrow accessors for the individual operations.
  Vec spray(const FiberPoint& p) const;
  std::pair<Mat, Tens3> interior_coefficients(const FiberPoint& p) const;
  Vec metrizability_residual(const FiberPoint& p) const;
  std::pair<Tens3, Mat> schouten_tensors(const FiberPoint& p) const;  // (K, P)
  Vec extension_coefficients(const FiberPoint& p) const;
  double reeb_metrizability_residual(const FiberPoint& p) const;

 private:
  chart::Chart chart_;
  finsler::FinslerMetric metric_;
  Options options_;
  // Shared jet contexts per depth (index by order).
  std::array<std::shared_ptr<const jets::JetContext>, 6> contexts_;
};

// Independent cross-check for quadratic energies F = g_ab(x) v^a v^b: the
// frame Christoffel symbols of g contracted with v,
//   C^c_{ab} = g^{cd} (e_a g_bd + e_b g_ad - e_d g_ab) / 2,
// returned as M[c][a] = C^c_{ab} v^b. Throws ConfigError when F is not
// quadratic in v (detected by probing the fiber Hessian at several v).
Mat riemannian_reduction_oracle(const finsler::FinslerMetric& fm,
                                const chart::Chart& chart,
                                const FiberPoint& p);

}  // namespace wagner::connection
