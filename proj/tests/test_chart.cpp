#include <doctest.h>

#include <cmath>
#include <vector>

#include "wagner/chart.hpp"

namespace {

using wagner::DegenerateStructureError;
using wagner::Vec;
using wagner::chart::AdaptedTransition;
using wagner::chart::Chart;
using wagner::expr::Expr;
using wagner::expr::VarSet;

Chart heis5() { return Chart::preset("HEIS5"); }

std::vector<Expr> parse_gamma(std::initializer_list<const char*> sources, int m) {
  const auto vars = VarSet::chart_vars(m);
  std::vector<Expr> out;
  for (const char* s : sources) out.push_back(Expr::parse(s, vars));
  return out;
}

}  // namespace

TEST_CASE("HEIS5 fundamental 2-form has the constant symplectic blocks") {
  const Chart ch = heis5();
  const auto omega = ch.omega({0.4, -1.1, 0.2, 0.9, 3.0});
  const double want_lower[4][4] = {
      {0, 1, 0, 0}, {-1, 0, 0, 0}, {0, 0, 0, 1}, {0, 0, -1, 0}};
  const double want_upper[4][4] = {
      {0, -1, 0, 0}, {1, 0, 0, 0}, {0, 0, 0, -1}, {0, 0, 1, 0}};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      CHECK(omega.lower[i][j] == doctest::Approx(want_lower[i][j]));
      CHECK(omega.upper[i][j] == doctest::Approx(want_upper[i][j]));
    }
}

TEST_CASE("the raised form inverts the lowered one in both conventions") {
  const auto gamma = parse_gamma(
      {"-x2 - 0.3*x4", "0.2*x1", "-x4 + 0.1*x2", "0"}, 2);
  const Chart ch(2, gamma);
  const Vec x{0.3, -0.2, 0.5, 1.2, 0.1};
  for (bool transpose : {false, true}) {
    // Plain convention: w^{ij} w_{jk} = delta. Transposed convention stores
    // the transposed inverse, so the contraction runs over the second index
    // of both factors: w^{ij} w_{kj} = delta.
    const auto omega = ch.omega(x, transpose);
    for (int i = 0; i < 4; ++i)
      for (int k = 0; k < 4; ++k) {
        double acc = 0.0;
        for (int j = 0; j < 4; ++j) {
          acc += transpose ? omega.upper[i][j] * omega.lower[k][j]
                           : omega.upper[i][j] * omega.lower[j][k];
        }
        CHECK(acc == doctest::Approx(i == k ? 1.0 : 0.0).epsilon(1e-12));
      }
  }
}

TEST_CASE("omega agrees with the exterior-derivative components of the cobasis") {
  // Independent route: w_ij = e_i gamma_j - e_j gamma_i through central
  // differences on the plain coefficient values, no jets anywhere.
  const auto gamma = parse_gamma(
      {"-x2*x5", "0.5*x3^2", "-x4 + sin(x1)", "0.1*x2*x3"}, 2);
  const Chart ch(2, gamma);
  const Vec x{0.7, -0.3, 0.4, 1.1, 0.6};
  const double h = 1e-6;

  auto gamma_at = [&](int a, Vec at) { return ch.gamma_value(a, at); };
  auto e_fd = [&](int i, int a) {
    Vec up = x, dn = x;
    up[i] += h;
    dn[i] -= h;
    double d_i = (gamma_at(a, up) - gamma_at(a, dn)) / (2 * h);
    up = x;
    dn = x;
    up[4] += h;
    dn[4] -= h;
    double d_n = (gamma_at(a, up) - gamma_at(a, dn)) / (2 * h);
    return d_i - ch.gamma_value(i, x) * d_n;
  };

  const auto omega = ch.omega(x);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const double want = e_fd(i, j) - e_fd(j, i);
      CHECK(omega.lower[i][j] == doctest::Approx(want).epsilon(1e-8));
    }
}

TEST_CASE("rank loss of the 2-form is reported as a degenerate structure") {
  // gamma == 0 everywhere: the cobasis is closed, rank 0.
  const Chart zero(2, parse_gamma({"0", "0", "0", "0"}, 2));
  CHECK_THROWS_AS((void)zero.omega({0, 0, 0, 0, 0}), DegenerateStructureError);

  // Rank drops only on the slice x5 = 0 here.
  const Chart sliced(2, parse_gamma({"-x2*x5", "0", "-x4", "0"}, 2));
  CHECK_THROWS_AS((void)sliced.omega({1, 2, 3, 4, 0}), DegenerateStructureError);
  CHECK_NOTHROW((void)sliced.omega({1, 2, 3, 4, 0.5}));
}

TEST_CASE("frame derivative follows the frame, not the bare coordinate") {
  const Chart ch = heis5();
  const auto vars = VarSet::chart_vars(2);

  // e_1 x5 = -gamma_1 = x2.
  const Expr f = Expr::parse("x5", vars);
  CHECK(ch.frame_derivative(f, 0, {0, 3, 0, 0, 0}) == doctest::Approx(3.0));

  // e_1 (x1 x2 + x5^2) = x2 + 2 x2 x5, e_3 of it = 2 x4 x5.
  const Expr g = Expr::parse("x1*x2 + x5^2", vars);
  const Vec x{1, 2, 3, 4, 5};
  CHECK(ch.frame_derivative(g, 0, x) == doctest::Approx(22.0));
  CHECK(ch.frame_derivative(g, 2, x) == doctest::Approx(40.0));

  // Fiber-dependent functions work the same way through the v argument.
  const auto fiber_vars = VarSet::fiber_vars(2);
  const Expr h = Expr::parse("v1*x5", fiber_vars);
  const Vec v{2.5, 0, 0, 0};
  CHECK(ch.frame_derivative(h, 0, x, &v) == doctest::Approx(2.0 * 2.5));
}

TEST_CASE("reeb defect measures the x_n-dependence of the frame coefficients") {
  const Chart ch = heis5();
  const Vec defect = ch.reeb_defect({0.3, 1.0, -0.5, 2.0, 0.7});
  for (double d : defect) CHECK(d == doctest::Approx(0.0));

  const Chart tilted(2, parse_gamma({"-x2*x5", "0", "-x4", "0"}, 2));
  const Vec d2 = tilted.reeb_defect({0, 3, 0, 0, 0});
  CHECK(d2[0] == doctest::Approx(-3.0));
  CHECK(d2[1] == doctest::Approx(0.0));
  CHECK(d2[2] == doctest::Approx(0.0));
  CHECK(d2[3] == doctest::Approx(0.0));
}

TEST_CASE("chart construction validates the shape of gamma") {
  CHECK_THROWS_AS(Chart(2, parse_gamma({"0", "0"}, 2)), wagner::ConfigError);
  CHECK_THROWS_AS(Chart(1, parse_gamma({"-x2", "0"}, 1)), wagner::ConfigError);
  CHECK_NOTHROW(Chart(1, parse_gamma({"-x2", "0"}, 1), /*allow_m1=*/true));
  CHECK_THROWS_AS(Chart::preset("NOPE"), wagner::ConfigError);
}

TEST_CASE("adapted transitions compose with their inverses") {
  AdaptedTransition tr;
  tr.A = {{1.0, 0.2, 0.0, -0.1},
          {0.0, 0.9, 0.3, 0.0},
          {0.1, 0.0, 1.1, 0.0},
          {0.0, -0.2, 0.0, 0.8}};
  tr.b = {0.5, -0.3, 0.0, 1.0};
  tr.c = 2.0;

  const Vec x{0.3, 0.7, -0.2, 0.4, 1.5};
  const Vec y = tr.apply(x);
  CHECK(y.size() == 5);
  CHECK(y[4] == doctest::Approx(x[4] + tr.c));

  const auto inv = tr.inverse_A();
  for (int i = 0; i < 4; ++i) {
    double back = 0.0;
    for (int j = 0; j < 4; ++j) back += inv[i][j] * (y[j] - tr.b[j]);
    CHECK(back == doctest::Approx(x[i]).epsilon(1e-12));
  }
}

TEST_CASE("pushforward weights upper slots with A and lower slots with A^-1") {
  AdaptedTransition tr;
  tr.A = {{2, 0, 0, 0}, {0, 3, 0, 0}, {0, 0, 5, 0}, {0, 0, 0, 7}};
  tr.b = {0, 0, 0, 0};
  tr.c = 0.0;

  // (1,1) tensor with a single entry T^1_2 = 1 (0-indexed [0][1]).
  std::vector<double> t(16, 0.0);
  t[0 * 4 + 1] = 1.0;
  const auto out = wagner::chart::pushforward_admissible(t, 1, 1, tr);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const double want = (i == 0 && j == 1) ? 2.0 / 3.0 : 0.0;
      CHECK(out[i * 4 + j] == doctest::Approx(want).epsilon(1e-12));
    }

  // Pushing a (1,1) identity through any transition returns the identity.
  AdaptedTransition gen;
  gen.A = {{1.0, 0.4, -0.2, 0.0},
           {0.1, 1.2, 0.0, 0.3},
           {0.0, -0.3, 0.9, 0.1},
           {0.2, 0.0, 0.1, 1.1}};
  gen.b = {1, 2, 3, 4};
  gen.c = -1.0;
  std::vector<double> eye(16, 0.0);
  for (int i = 0; i < 4; ++i) eye[i * 4 + i] = 1.0;
  const auto id_out = wagner::chart::pushforward_admissible(eye, 1, 1, gen);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      CHECK(id_out[i * 4 + j] ==
            doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));
    }

  // A pure upper vector transforms with A alone.
  std::vector<double> vec{1.0, -2.0, 0.5, 0.0};
  const auto vec_out = wagner::chart::pushforward_admissible(vec, 1, 0, gen);
  for (int i = 0; i < 4; ++i) {
    double want = 0.0;
    for (int j = 0; j < 4; ++j) want += gen.A[i][j] * vec[j];
    CHECK(vec_out[i] == doctest::Approx(want).epsilon(1e-12));
  }
}
