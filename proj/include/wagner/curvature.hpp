#pragma once

#include <span>
#include <vector>

#include "wagner/connection.hpp"
#include "wagner/types.hpp"

namespace wagner::curvature {

// Curvature data at one point, with the trace contraction evaluated for
// reporting (its value depends on the raised-2-form convention).
struct CurvatureEvaluation {
  Tens3 R_hor;    // R_hor[c][a][b], antisymmetric in (a, b)
  Mat R_mixed;    // R_mixed[c][a]
  Vec k_trace;    // w^{ba} K^c_{ab}
  Vec r_trace;    // w^{ab} R_hor^c_{ab}
  double max_abs = 0.0;
};

CurvatureEvaluation wagner_curvature(const connection::Solver& solver,
                                     const FiberPoint& p);
Tens3 wagner_horizontal(const connection::Solver& solver, const FiberPoint& p);
Mat wagner_mixed(const connection::Solver& solver, const FiberPoint& p);

// Marks the extended vertical field U in bracket pair selectors.
inline constexpr int kReebIndex = -1;

// One measured Lie bracket, decomposed in the moving frame (eps_c, U, d_{n+c})
// and compared against the assembled curvature:
//   [eps_a, eps_b] should be w_{ba} U + R_hor^c_{ab} d_{n+c},
//   [eps_a, U]     should be (d_n gamma_a) U + R_mixed^c_a d_{n+c}.
struct BracketSample {
  int a = 0;
  int b = kReebIndex;     // kReebIndex selects the [eps_a, U] bracket
  Vec p;                  // eps-frame components; structurally zero
  double q = 0.0;         // U component
  double q_expected = 0.0;
  Vec r;                  // fiber components, measured
  Vec r_expected;         // assembled R_hor / R_mixed slice
  double max_p_abs = 0.0;
  double q_residual = 0.0;
  // max_c |r - r_expected| / max(1e-2, |r_expected|): a relative deviation
  // that degrades to a 1e-8-per-1e-6 absolute scale for small components.
  double r_deviation = 0.0;
};

// Central differences with one Richardson step on the frame fields of the
// (4m+1)-dimensional total space; the differencing never touches the jet
// machinery, so this path is computationally independent of the assembly.
BracketSample lie_bracket_oracle(const connection::Solver& solver,
                                 const FiberPoint& p, int a, int b,
                                 double fd_step = 1e-4);

// All brackets at one point — the 2m(2m-1)/2 horizontal pairs plus the 2m
// mixed pairs — sharing the displaced field evaluations.
struct BracketReport {
  std::vector<BracketSample> samples;
  double max_p_abs = 0.0;
  double max_q_residual = 0.0;
  double max_r_deviation = 0.0;
};

BracketReport bracket_oracle_all(const connection::Solver& solver,
                                 const FiberPoint& p, double fd_step = 1e-4);

// Flatness classification over a sample set: flat iff every curvature
// component stays within `tol` in absolute value.
struct FlatnessScan {
  std::size_t points = 0;
  double max_abs_hor = 0.0;
  double max_abs_mixed = 0.0;
  double max_abs = 0.0;
  FiberPoint argmax;
  double tol = 1e-8;
  bool flat = false;
};

FlatnessScan flatness_scan(const connection::Solver& solver,
                           std::span<const FiberPoint> points,
                           double tol = 1e-8);

}  // namespace wagner::curvature
