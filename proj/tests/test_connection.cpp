#include <doctest.h>

#include <cmath>
#include <vector>

#include "wagner/connection.hpp"
#include "wagner/sampling.hpp"

namespace {

using wagner::FiberPoint;
using wagner::Vec;
using wagner::chart::Chart;
using wagner::connection::Depth;
using wagner::connection::Evaluation;
using wagner::connection::Options;
using wagner::connection::Solver;
using wagner::expr::Expr;
using wagner::expr::VarSet;
using wagner::finsler::FinslerMetric;

Solver preset_solver(const char* metric, Options options = {}) {
  return Solver(Chart::preset("HEIS5"), FinslerMetric::preset(metric, 2),
                options);
}

double max_abs(const wagner::Tens3& t) {
  double m = 0.0;
  for (const auto& mat : t)
    for (const auto& row : mat)
      for (double x : row) m = std::max(m, std::abs(x));
  return m;
}

double max_abs(const wagner::Mat& t) {
  double m = 0.0;
  for (const auto& row : t)
    for (double x : row) m = std::max(m, std::abs(x));
  return m;
}

double max_abs(const Vec& t) {
  double m = 0.0;
  for (double x : t) m = std::max(m, std::abs(x));
  return m;
}

const FiberPoint kOriginE1{{0, 0, 0, 0, 0}, {1, 0, 0, 0}};

}  // namespace

TEST_CASE("curved preset at the frozen point reproduces the hand values") {
  const Solver solver = preset_solver("CURV5");
  const Evaluation ev = solver.evaluate(kOriginE1, Depth::Curvature);

  // Spray and interior coefficients.
  CHECK(ev.spray[0] == doctest::Approx(0.0));
  CHECK(ev.spray[1] == doctest::Approx(-1.0));
  CHECK(ev.spray[2] == doctest::Approx(0.0));
  CHECK(ev.spray[3] == doctest::Approx(0.0));
  CHECK(ev.G[0][1] == doctest::Approx(1.0));
  CHECK(ev.G[1][0] == doctest::Approx(-1.0));
  CHECK(ev.G[0][0] == doctest::Approx(0.0));
  CHECK(ev.G[1][1] == doctest::Approx(0.0));

  // Schouten tensors.
  CHECK(ev.K[1][0][1] == doctest::Approx(-1.0));  // K^2_{12} = -exp(2 x2) v1
  CHECK(ev.K[1][1][0] == doctest::Approx(1.0));
  CHECK(max_abs(ev.P) == doctest::Approx(0.0));

  // Extension coefficients and curvature.
  CHECK(ev.G_n[0] == doctest::Approx(0.0));  // 2 v2 = 0 here
  CHECK(ev.G_n[1] == doctest::Approx(-2.0));
  CHECK(ev.R_hor[1][0][1] == doctest::Approx(1.0));
  CHECK(ev.R_hor[1][1][0] == doctest::Approx(-1.0));
  CHECK(ev.R_mixed[1][1] == doctest::Approx(2.0));
  CHECK(ev.reeb_residual == doctest::Approx(0.0));
  CHECK(ev.k_trace[1] == doctest::Approx(-2.0));
}

TEST_CASE("curved preset keeps its closed forms at a generic point") {
  const Solver solver = preset_solver("CURV5");
  const FiberPoint p{{0.3, -0.4, 0.1, 0.9, 2.0}, {0.7, -1.2, 0.5, 0.3}};
  const double e2 = std::exp(2.0 * p.x[1]);
  const Evaluation ev = solver.evaluate(p, Depth::Curvature);

  CHECK(ev.K[1][0][1] == doctest::Approx(-e2 * p.v[0]).epsilon(1e-12));
  CHECK(ev.K[0][0][1] == doctest::Approx(p.v[1]).epsilon(1e-12));
  CHECK(ev.G_n[1] == doctest::Approx(-2.0 * e2 * p.v[0]).epsilon(1e-12));
  CHECK(ev.G_n[0] == doctest::Approx(2.0 * p.v[1]).epsilon(1e-12));
  CHECK(ev.R_hor[1][0][1] == doctest::Approx(e2 * p.v[0]).epsilon(1e-12));
  CHECK(ev.R_mixed[1][1] == doctest::Approx(2.0 * e2 * p.v[0]).epsilon(1e-12));
  CHECK(ev.R_mixed[0][1] == doctest::Approx(-2.0 * p.v[1]).epsilon(1e-12));
  CHECK(ev.reeb_residual == doctest::Approx(0.0));
}

TEST_CASE("warped preset is metrizable with vanishing curvature") {
  const Solver solver = preset_solver("WARP5");
  const FiberPoint p{{0.5, -0.2, 0.8, 0.1, 1.0}, {1.1, 0.4, -0.3, 0.9}};
  const Evaluation ev = solver.evaluate(p, Depth::Curvature);
  CHECK(ev.G[0][0] == doctest::Approx(p.v[0]).epsilon(1e-12));
  CHECK(max_abs(ev.K) <= 1e-12);
  CHECK(max_abs(ev.P) <= 1e-12);
  CHECK(max_abs(ev.G_n) <= 1e-12);
  CHECK(max_abs(ev.R_hor) <= 1e-12);
  CHECK(max_abs(ev.R_mixed) <= 1e-12);
  CHECK(max_abs(ev.metrizability) <= 1e-12);
}

TEST_CASE("flat preset produces exact zeros end to end") {
  const Solver solver = preset_solver("F_EUC");
  const FiberPoint p{{0.5, -0.2, 0.8, 0.1, 1.0}, {1.1, 0.4, -0.3, 0.9}};
  const Evaluation ev = solver.evaluate(p, Depth::Curvature);
  CHECK(max_abs(ev.spray) == 0.0);
  CHECK(max_abs(ev.G) == 0.0);
  CHECK(max_abs(ev.K) == 0.0);
  CHECK(max_abs(ev.R_hor) == 0.0);
  CHECK(max_abs(ev.R_mixed) == 0.0);
  CHECK(max_abs(ev.metrizability) == 0.0);
}

TEST_CASE("interior coefficients recover the spray and are vertically symmetric") {
  for (const char* name : {"CURV5", "RAND5", "WARP5"}) {
    const Solver solver = preset_solver(name);
    const auto pts = wagner::sampling::sample_fiber_points(
        wagner::sampling::unit_box(2), 2, 16, 11);
    for (const auto& p : pts) {
      const Evaluation ev = solver.evaluate(p, Depth::Schouten);
      INFO("preset ", name, " at ", wagner::format_point(p));
      for (int c = 0; c < 4; ++c) {
        double acc = 0.0;
        for (int d = 0; d < 4; ++d) acc += ev.G[c][d] * p.v[d];
        CHECK(acc == doctest::Approx(ev.spray[c]).epsilon(1e-10));
        for (int d = 0; d < 4; ++d)
          for (int b = 0; b < d; ++b)
            CHECK(ev.G_vert[c][d][b] ==
                  doctest::Approx(ev.G_vert[c][b][d]).epsilon(1e-10));
      }
      CHECK(max_abs(ev.metrizability) <= 1e-8);
    }
  }
}

TEST_CASE("quadratic energies match the frame Christoffel contraction") {
  for (const char* name : {"F_EUC", "WARP5", "CURV5"}) {
    const Solver solver = preset_solver(name);
    const auto pts = wagner::sampling::sample_fiber_points(
        wagner::sampling::unit_box(2), 2, 8, 23);
    for (const auto& p : pts) {
      const auto oracle = wagner::connection::riemannian_reduction_oracle(
          solver.metric(), solver.chart(), p);
      const auto [G, G_vert] = solver.interior_coefficients(p);
      INFO("preset ", name);
      for (int c = 0; c < 4; ++c)
        for (int a = 0; a < 4; ++a)
          CHECK(G[c][a] == doctest::Approx(oracle[c][a]).epsilon(1e-11));
    }
  }
}

TEST_CASE("the reduction oracle rejects non-quadratic energies") {
  const Solver solver = preset_solver("RAND5");
  CHECK_THROWS_AS(wagner::connection::riemannian_reduction_oracle(
                      solver.metric(), solver.chart(), kOriginE1),
                  wagner::ConfigError);
}

TEST_CASE("non-quadratic energy still parallelizes F along the connection") {
  const Solver solver = preset_solver("RAND5");
  const auto pts = wagner::sampling::sample_fiber_points(
      wagner::sampling::unit_box(2), 2, 32, 5);
  for (const auto& p : pts) {
    CHECK(max_abs(solver.metrizability_residual(p)) <= 1e-12);
    // The interior coefficients are x-independent for this energy.
    CHECK(max_abs(solver.interior_coefficients(p).first) <= 1e-12);
  }
}

TEST_CASE("all produced fields are 1-homogeneous except F and g") {
  const Solver solver = preset_solver("RAND5");
  const FiberPoint p{{0.2, -0.6, 0.4, 1.0, 0.3}, {0.8, -0.5, 1.2, 0.4}};
  const Evaluation base = solver.evaluate(p, Depth::Curvature);
  for (double lambda : {0.5, 2.0, 7.0}) {
    FiberPoint q = p;
    for (double& vi : q.v) vi *= lambda;
    const Evaluation ev = solver.evaluate(q, Depth::Curvature);
    CHECK(ev.F == doctest::Approx(lambda * lambda * base.F).epsilon(1e-10));
    for (int c = 0; c < 4; ++c) {
      CHECK(ev.spray[c] ==
            doctest::Approx(lambda * lambda * base.spray[c]).epsilon(1e-9));
      CHECK(ev.G_n[c] ==
            doctest::Approx(lambda * base.G_n[c]).epsilon(1e-9));
      for (int a = 0; a < 4; ++a) {
        CHECK(ev.G[c][a] ==
              doctest::Approx(lambda * base.G[c][a]).epsilon(1e-9));
        CHECK(ev.R_mixed[c][a] ==
              doctest::Approx(lambda * base.R_mixed[c][a]).epsilon(1e-9));
        for (int b = 0; b < 4; ++b)
          CHECK(ev.R_hor[c][a][b] ==
                doctest::Approx(lambda * base.R_hor[c][a][b]).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("sigma rescales the extension coefficients linearly") {
  Options opt;
  opt.eq_sigma = 2.5;
  const Solver scaled = preset_solver("CURV5", opt);
  const Solver plain = preset_solver("CURV5");
  const FiberPoint p{{0.1, 0.3, -0.2, 0.5, 0.0}, {1.0, -0.7, 0.2, 0.4}};
  const Evaluation a = scaled.evaluate(p, Depth::Schouten);
  const Evaluation b = plain.evaluate(p, Depth::Schouten);
  for (int c = 0; c < 4; ++c) {
    CHECK(a.G_n[c] == doctest::Approx(2.5 * b.G_n[c]).epsilon(1e-12));
    CHECK(a.k_trace[c] == doctest::Approx(b.k_trace[c]).epsilon(1e-12));
    // K itself does not depend on sigma.
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        CHECK(a.K[c][i][j] == doctest::Approx(b.K[c][i][j]).epsilon(1e-12));
  }
}

TEST_CASE("the transposed raised-form convention flips the extension sign") {
  Options opt;
  opt.omega_inverse_transpose = true;
  const Solver solver = preset_solver("CURV5", opt);
  const Evaluation ev = solver.evaluate(kOriginE1, Depth::Curvature);
  // With the transposed (here: negated) raised form the contraction flips.
  CHECK(ev.G_n[1] == doctest::Approx(2.0));
  CHECK(ev.R_hor[1][0][1] == doctest::Approx(-3.0));
  CHECK(ev.omega_upper[0][1] == doctest::Approx(1.0));
}

TEST_CASE("schouten K is antisymmetric in its lower pair, bitwise") {
  const Solver solver = preset_solver("RAND5");
  const FiberPoint p{{0.4, -0.1, 0.6, 0.2, 1.3}, {0.9, 0.3, -0.8, 0.5}};
  const Evaluation ev = solver.evaluate(p, Depth::Curvature);
  for (int c = 0; c < 4; ++c)
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        CHECK(ev.K[c][a][b] + ev.K[c][b][a] == 0.0);
        CHECK(ev.R_hor[c][a][b] + ev.R_hor[c][b][a] == 0.0);
      }
}

TEST_CASE("depth gates which tensors are filled") {
  const Solver solver = preset_solver("CURV5");
  const Evaluation metric_only = solver.evaluate(kOriginE1, Depth::Metric);
  CHECK(metric_only.order == 2);
  CHECK(metric_only.g_lower.size() == 4);
  CHECK(metric_only.spray.empty());
  const Evaluation spray_only = solver.evaluate(kOriginE1, Depth::Spray);
  CHECK(spray_only.order == 3);
  CHECK(spray_only.spray.size() == 4);
  CHECK(spray_only.K.empty());
  const Evaluation schouten = solver.evaluate(kOriginE1, Depth::Schouten);
  CHECK(schouten.order == 4);
  CHECK(schouten.K.size() == 4);
  CHECK(schouten.R_mixed.empty());
  const Evaluation full = solver.evaluate(kOriginE1, Depth::Curvature);
  CHECK(full.order == 5);
  CHECK(full.R_mixed.size() == 4);
}

TEST_CASE("degenerate fiber metric surfaces as a typed error") {
  const Chart ch = Chart::preset("HEIS5");
  const FinslerMetric fm(
      Expr::parse("v1^2 + (1 - x1)*v2^2 + v3^2 + v4^2", VarSet::fiber_vars(2)),
      "pinched");
  const Solver solver(ch, fm);
  CHECK_NOTHROW(solver.evaluate(kOriginE1, Depth::Curvature));
  CHECK_THROWS_AS(
      solver.evaluate({{2.0, 0, 0, 0, 0}, {1, 1, 0, 0}}, Depth::Spray),
      wagner::MetricDegeneracyError);
}

TEST_CASE("points with wrong dimensions are rejected") {
  const Solver solver = preset_solver("F_EUC");
  CHECK_THROWS_AS(solver.evaluate({{0, 0, 0}, {1, 0, 0, 0}}, Depth::Metric),
                  wagner::ConfigError);
  CHECK_THROWS_AS(solver.evaluate({{0, 0, 0, 0, 0}, {1, 0}}, Depth::Metric),
                  wagner::ConfigError);
}

TEST_CASE("narrow accessors agree with the full evaluation") {
  const Solver solver = preset_solver("CURV5");
  const FiberPoint p{{0.3, -0.4, 0.1, 0.9, 2.0}, {0.7, -1.2, 0.5, 0.3}};
  const Evaluation ev = solver.evaluate(p, Depth::Curvature);

  CHECK(max_abs(solver.spray(p)) == doctest::Approx(max_abs(ev.spray)));
  const auto [K, P] = solver.schouten_tensors(p);
  for (int c = 0; c < 4; ++c)
    for (int a = 0; a < 4; ++a) {
      CHECK(P[c][a] == doctest::Approx(ev.P[c][a]).epsilon(1e-14));
      for (int b = 0; b < 4; ++b)
        CHECK(K[c][a][b] == doctest::Approx(ev.K[c][a][b]).epsilon(1e-14));
    }
  const Vec gn = solver.extension_coefficients(p);
  for (int c = 0; c < 4; ++c)
    CHECK(gn[c] == doctest::Approx(ev.G_n[c]).epsilon(1e-14));
  CHECK(solver.reeb_metrizability_residual(p) ==
        doctest::Approx(ev.reeb_residual).epsilon(1e-14));
}
