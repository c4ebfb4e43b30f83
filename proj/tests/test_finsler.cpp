#include <doctest.h>

#include <cmath>

#include "wagner/finsler.hpp"
#include "wagner/sampling.hpp"

namespace {

using wagner::FiberPoint;
using wagner::MetricDegeneracyError;
using wagner::Vec;
using wagner::chart::Chart;
using wagner::expr::Expr;
using wagner::expr::VarSet;
using wagner::finsler::FinslerMetric;
using wagner::finsler::metric_at;
using wagner::finsler::validate_metric;

FinslerMetric custom(const char* energy, bool is_length = false) {
  return FinslerMetric(Expr::parse(energy, VarSet::fiber_vars(2)), "custom",
                       is_length);
}

}  // namespace

TEST_CASE("the flat quadratic energy has the identity fiber metric") {
  const Chart ch = Chart::preset("HEIS5");
  const auto fm = FinslerMetric::preset("F_EUC", 2);
  const auto at =
      metric_at(fm, ch, {{0.3, -1.0, 0.7, 0.2, 5.0}, {1.5, -0.5, 2.0, 0.25}});
  CHECK(at.F_value == doctest::Approx(1.5 * 1.5 + 0.25 + 4.0 + 0.0625));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      CHECK(at.g_lower[i][j] == doctest::Approx(i == j ? 1.0 : 0.0));
      CHECK(at.g_upper[i][j] == doctest::Approx(i == j ? 1.0 : 0.0));
    }
  // Euler identity v^a F_{.a} = 2F for the gradient as well.
  double euler = 1.5 * at.F_grad_fiber[0] - 0.5 * at.F_grad_fiber[1] +
                 2.0 * at.F_grad_fiber[2] + 0.25 * at.F_grad_fiber[3];
  CHECK(euler == doctest::Approx(2.0 * at.F_value));
}

TEST_CASE("the curved preset rescales the first fiber direction") {
  const Chart ch = Chart::preset("HEIS5");
  const auto fm = FinslerMetric::preset("CURV5", 2);
  const double x2 = std::log(2.0) / 2.0;  // exp(2 x2) = 2
  const auto at =
      metric_at(fm, ch, {{0.0, x2, 0.0, 0.0, 0.0}, {1.0, 1.0, 1.0, 1.0}});
  const double want[4] = {2.0, 1.0, 1.0, 1.0};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      CHECK(at.g_lower[i][j] == doctest::Approx(i == j ? want[i] : 0.0));
  CHECK(at.F_value == doctest::Approx(2.0 + 3.0));
  CHECK(at.g_upper[0][0] == doctest::Approx(0.5));
}

TEST_CASE("the non-quadratic preset evaluates as a perturbed norm") {
  const Chart ch = Chart::preset("HEIS5");
  const auto fm = FinslerMetric::preset("RAND5", 2);
  const auto at = metric_at(fm, ch, {{0, 0, 0, 0, 0}, {1.0, 0.0, 0.0, 0.0}});
  CHECK(at.F_value == doctest::Approx(1.21));  // (|v| + 0.1 v1)^2 = 1.1^2
  CHECK(at.F_grad_fiber[0] == doctest::Approx(2.0 * at.F_value));
}

TEST_CASE("metric validation passes every shipped preset") {
  const Chart ch = Chart::preset("HEIS5");
  const auto box = wagner::sampling::unit_box(2);
  for (const char* name : {"F_EUC", "WARP5", "CURV5", "RAND5"}) {
    const auto fm = FinslerMetric::preset(name, 2);
    const auto points = wagner::sampling::sample_fiber_points(box, 2, 64, 7);
    const auto diag = validate_metric(fm, ch, points);
    INFO("preset ", name);
    CHECK(diag.pass);
    CHECK(diag.max_euler_residual <= 1e-10);
    CHECK(diag.min_eigenvalue > 0.0);
    CHECK(diag.samples.size() == 64);
  }
}

TEST_CASE("a non-homogeneous energy is flagged by the euler residual") {
  // Positive definite (g = identity) but not 2-homogeneous.
  const auto fm = custom("v1^2 + v2^2 + v3^2 + v4^2 + v1");
  const std::vector<FiberPoint> pts{{{0, 0, 0, 0, 0}, {1.0, 0.0, 0.0, 0.0}}};
  const auto diag = validate_metric(fm, Chart::preset("HEIS5"), pts);
  CHECK_FALSE(diag.pass);
  // v . dF = 3 while 2F = 4 at v = e1: |3 - 4| / max(1, |F|) = 0.5.
  CHECK(diag.max_euler_residual == doctest::Approx(0.5));
  CHECK(diag.samples.at(0).definite);

  // A degenerate Hessian is reported through the definiteness flag instead.
  const auto degenerate = custom("v1^2 + v1");
  const auto diag2 = validate_metric(degenerate, Chart::preset("HEIS5"), pts);
  CHECK_FALSE(diag2.pass);
  CHECK_FALSE(diag2.samples.at(0).definite);
  CHECK(diag2.min_eigenvalue <= 1e-12);
}

TEST_CASE("an indefinite quadratic raises a degeneracy error with the witness") {
  const auto fm = custom("v1^2 - v2^2 + v3^2 + v4^2");
  try {
    (void)metric_at(fm, Chart::preset("HEIS5"),
                    {{0, 0, 0, 0, 0}, {1.0, 1.0, 1.0, 1.0}});
    FAIL("expected MetricDegeneracyError");
  } catch (const MetricDegeneracyError& err) {
    CHECK(err.min_eigenvalue == doctest::Approx(-1.0));  // g = diag(1,-1,1,1)
  }
}

TEST_CASE("a length-type input is squared into an energy") {
  const auto fm = custom("sqrt(v1^2 + v2^2 + v3^2 + v4^2)", /*is_length=*/true);
  const auto at =
      metric_at(fm, Chart::preset("HEIS5"), {{0, 0, 0, 0, 0}, {3.0, 4.0, 0.0, 0.0}});
  CHECK(at.F_value == doctest::Approx(25.0));
  for (int i = 0; i < 4; ++i)
    CHECK(at.g_lower[i][i] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("preset lookup validates name and dimension") {
  CHECK_THROWS_AS(FinslerMetric::preset("NOPE", 2), wagner::ConfigError);
  CHECK_THROWS_AS(FinslerMetric::preset("F_EUC", 3), wagner::ConfigError);
  CHECK_THROWS_AS(
      (void)metric_at(FinslerMetric::preset("F_EUC", 2), Chart::preset("HEIS5"),
                      {{0, 0, 0}, {1, 0, 0, 0}}),
      wagner::ConfigError);
}
