#include <doctest.h>

#include <cmath>
#include <vector>

#include "wagner/curvature.hpp"
#include "wagner/sampling.hpp"

namespace {

using wagner::FiberPoint;
using wagner::chart::Chart;
using wagner::connection::Options;
using wagner::connection::Solver;
using wagner::curvature::bracket_oracle_all;
using wagner::curvature::kReebIndex;
using wagner::curvature::lie_bracket_oracle;
using wagner::expr::Expr;
using wagner::expr::VarSet;
using wagner::finsler::FinslerMetric;

Solver preset_solver(const char* metric, Options options = {}) {
  return Solver(Chart::preset("HEIS5"), FinslerMetric::preset(metric, 2),
                options);
}

const FiberPoint kGeneric{{0.3, -0.4, 0.1, 0.9, 2.0}, {0.7, -1.2, 0.5, 0.3}};

}  // namespace

TEST_CASE("measured lie brackets agree with the assembled curvature") {
  for (const char* name : {"F_EUC", "WARP5", "CURV5", "RAND5"}) {
    const Solver solver = preset_solver(name);
    const auto pts = wagner::sampling::sample_fiber_points(
        wagner::sampling::unit_box(2), 2, 6, 31);
    for (const auto& p : pts) {
      const auto report = bracket_oracle_all(solver, p);
      INFO("preset ", name, " at ", wagner::format_point(p));
      CHECK(report.samples.size() == 6 + 4);
      CHECK(report.max_p_abs <= 1e-6);
      CHECK(report.max_q_residual <= 1e-6);
      CHECK(report.max_r_deviation <= 1e-6);
    }
  }
}

TEST_CASE("bracket oracle also validates an x5-dependent structure") {
  // Both gamma and F depend on the distinguished coordinate, so the reeb
  // defect, the d_n gamma correction in the mixed curvature and a nonzero P
  // are all exercised at once.
  const auto vars = VarSet::chart_vars(2);
  std::vector<Expr> gamma;
  for (const char* s : {"-x2*(1 + 0.3*x5)", "0", "-x4", "0"})
    gamma.push_back(Expr::parse(s, vars));
  const FinslerMetric fm(
      Expr::parse("exp(2*x2 + 0.5*x5)*v1^2 + v2^2 + v3^2 + v4^2",
                  VarSet::fiber_vars(2)),
      "warped-n");
  const Solver solver(Chart(2, gamma), fm);

  const FiberPoint p{{0.2, 0.5, -0.3, 0.4, 0.3}, {1.0, -0.6, 0.8, 0.2}};
  const auto report = bracket_oracle_all(solver, p);
  CHECK(report.max_p_abs <= 1e-6);
  CHECK(report.max_q_residual <= 1e-6);
  CHECK(report.max_r_deviation <= 1e-6);

  // The mixed bracket's U component is the reeb defect d_n gamma_1 = -0.3 x2.
  const auto mixed = lie_bracket_oracle(solver, p, 0, kReebIndex);
  CHECK(mixed.q_expected == doctest::Approx(-0.3 * p.x[1]).epsilon(1e-10));
  CHECK(mixed.q == doctest::Approx(mixed.q_expected).epsilon(1e-6));

  // P is nonzero here, unlike for the x5-independent charts.
  const auto ev = solver.evaluate(p, wagner::connection::Depth::Curvature);
  double pmax = 0.0;
  for (const auto& row : ev.P)
    for (double x : row) pmax = std::max(pmax, std::abs(x));
  CHECK(pmax > 1e-3);
}

TEST_CASE("single-pair oracle matches the batched report") {
  const Solver solver = preset_solver("CURV5");
  const auto report = bracket_oracle_all(solver, kGeneric);
  for (const auto& sample : report.samples) {
    const auto single =
        lie_bracket_oracle(solver, kGeneric, sample.a, sample.b);
    CHECK(single.q == doctest::Approx(sample.q).epsilon(1e-12));
    CHECK(single.r_deviation ==
          doctest::Approx(sample.r_deviation).epsilon(1e-6));
    for (std::size_t c = 0; c < sample.r.size(); ++c)
      CHECK(single.r[c] == doctest::Approx(sample.r[c]).epsilon(1e-10));
  }
}

TEST_CASE("horizontal brackets reproduce the 2-form in the U component") {
  const Solver solver = preset_solver("RAND5");
  const auto ev = solver.evaluate(kGeneric, wagner::connection::Depth::Schouten);
  const auto report = bracket_oracle_all(solver, kGeneric);
  for (const auto& sample : report.samples) {
    if (sample.b == kReebIndex) {
      CHECK(sample.q_expected == 0.0);  // HEIS5 has no x5 dependence
      continue;
    }
    CHECK(sample.q_expected ==
          doctest::Approx(ev.omega_lower[sample.b][sample.a]).epsilon(1e-12));
    CHECK(sample.q == doctest::Approx(sample.q_expected).epsilon(1e-8));
  }
}

TEST_CASE("frozen-point curvature values survive the oracle comparison") {
  const Solver solver = preset_solver("CURV5");
  const FiberPoint p{{0, 0, 0, 0, 0}, {1, 0, 0, 0}};
  const auto sample = lie_bracket_oracle(solver, p, 0, 1);
  CHECK(sample.r_expected[1] == doctest::Approx(1.0));   // R_hor^2_{12}
  CHECK(sample.r[1] == doctest::Approx(1.0).epsilon(1e-7));
  const auto mixed = lie_bracket_oracle(solver, p, 1, kReebIndex);
  CHECK(mixed.r_expected[1] == doctest::Approx(2.0));    // R_mixed^2_2
  CHECK(mixed.r[1] == doctest::Approx(2.0).epsilon(1e-7));
}

TEST_CASE("oracle still agrees under the transposed raised-form convention") {
  Options opt;
  opt.omega_inverse_transpose = true;
  const Solver solver = preset_solver("CURV5", opt);
  const auto report = bracket_oracle_all(solver, kGeneric);
  CHECK(report.max_p_abs <= 1e-6);
  CHECK(report.max_q_residual <= 1e-6);
  CHECK(report.max_r_deviation <= 1e-6);
}

TEST_CASE("curvature evaluation collects traces and the max component") {
  const Solver solver = preset_solver("CURV5");
  const auto ev = wagner::curvature::wagner_curvature(solver, kGeneric);
  CHECK(ev.max_abs > 0.1);
  // With sigma = 1 the curvature trace is (2m - 1) times the K trace.
  for (int c = 0; c < 4; ++c)
    CHECK(ev.r_trace[c] == doctest::Approx(3.0 * ev.k_trace[c]).epsilon(1e-10));
  const auto hor = wagner::curvature::wagner_horizontal(solver, kGeneric);
  const auto mixed = wagner::curvature::wagner_mixed(solver, kGeneric);
  for (int c = 0; c < 4; ++c)
    for (int a = 0; a < 4; ++a) {
      CHECK(mixed[c][a] == doctest::Approx(ev.R_mixed[c][a]).epsilon(1e-14));
      for (int b = 0; b < 4; ++b)
        CHECK(hor[c][a][b] ==
              doctest::Approx(ev.R_hor[c][a][b]).epsilon(1e-14));
    }
}

TEST_CASE("flatness scan separates the flat and curved presets") {
  const auto pts = wagner::sampling::sample_fiber_points(
      wagner::sampling::unit_box(2), 2, 64, 3);
  for (const char* name : {"F_EUC", "WARP5"}) {
    const auto scan =
        wagner::curvature::flatness_scan(preset_solver(name), pts);
    INFO("preset ", name);
    CHECK(scan.flat);
    CHECK(scan.max_abs <= 1e-8);
    CHECK(scan.points == 64);
  }
  const auto curved =
      wagner::curvature::flatness_scan(preset_solver("CURV5"), pts);
  CHECK_FALSE(curved.flat);
  CHECK(curved.max_abs > 0.1);
  CHECK(curved.argmax.x.size() == 5);

  const auto empty = wagner::curvature::flatness_scan(
      preset_solver("F_EUC"), std::span<const FiberPoint>{});
  CHECK_FALSE(empty.flat);
  CHECK(empty.points == 0);
}

TEST_CASE("oracle configuration errors are typed and informative") {
  const Solver solver = preset_solver("CURV5");
  CHECK_THROWS_AS(lie_bracket_oracle(solver, kGeneric, 0, 1, 1e-9),
                  wagner::ConfigError);
  CHECK_THROWS_AS(lie_bracket_oracle(solver, kGeneric, 0, 1, 0.0),
                  wagner::ConfigError);
  CHECK_THROWS_AS(lie_bracket_oracle(solver, kGeneric, 0, 0),
                  wagner::ConfigError);
  CHECK_THROWS_AS(lie_bracket_oracle(solver, kGeneric, -2, 1),
                  wagner::ConfigError);
  CHECK_THROWS_AS(lie_bracket_oracle(solver, kGeneric, 0, 7),
                  wagner::ConfigError);
}

TEST_CASE("swapping a horizontal pair negates the measured bracket") {
  const Solver solver = preset_solver("CURV5");
  const auto ab = lie_bracket_oracle(solver, kGeneric, 0, 1);
  const auto ba = lie_bracket_oracle(solver, kGeneric, 1, 0);
  CHECK(ab.q == doctest::Approx(-ba.q).epsilon(1e-10));
  for (std::size_t c = 0; c < ab.r.size(); ++c)
    CHECK(ab.r[c] == doctest::Approx(-ba.r[c]).epsilon(1e-8));
}
