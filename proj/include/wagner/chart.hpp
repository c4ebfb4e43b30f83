#pragma once

#include <memory>
#include <optional>
#include <string_view>

#include "wagner/expr.hpp"
#include "wagner/jets.hpp"
#include "wagner/types.hpp"

namespace wagner::chart {

// An adapted coordinate chart on a (2m+1)-dimensional contact manifold: the
// last coordinate x^n spans the closing line field, and the distribution is
// framed by e_a = d_a - gamma_a d_n for a = 1..2m, with cobasis
// (dx^a, dx^n + gamma_a dx^a). gamma_a are expressions of x1..xn only.
class Chart {
 public:
  // Known charts: "HEIS5" (m = 2, gamma = (-x2, 0, -x4, 0)).
  static Chart preset(std::string_view name);

  Chart(int m, std::vector<expr::Expr> gamma, bool allow_m1 = false);

  int m() const { return m_; }
  int dim() const { return 2 * m_ + 1; }       // n
  int fiber_dim() const { return 2 * m_; }     // 2m
  const std::string& label() const { return label_; }
  const std::vector<expr::Expr>& gamma() const { return gamma_; }

  double gamma_value(int a, const Vec& x) const;
  Vec gamma_values(const Vec& x) const;

  // Frame derivative e_a f = d_a f - gamma_a d_n f of an expression over the
  // fiber variable set (x1..xn, v1..v2m); v may be omitted for base-only f.
  double frame_derivative(const expr::Expr& f, int a, const Vec& x,
                          const Vec* v = nullptr) const;

  // Same, inside a caller-supplied jet computation: jet directions must be
  // aligned with the fiber variable slots (x_i -> dir i, v_j -> dir n+j).
  // Returns the jet of e_a f with truncation one lower than f's.
  jets::Jet frame_derivative(const jets::Jet& f,
                             std::span<const jets::Jet> gamma_jets,
                             int a) const;

  struct Omega {
    Mat lower;  // lower[i][j] = w_ij, the d_n-component of [e_j, e_i]
    Mat upper;  // w^ij with w^ij w_jk = delta^i_k (transposed on request)
  };

  // Fundamental 2-form at x; throws DegenerateStructureError when its rank
  // drops below 2m (contact condition violated at x).
  Omega omega(const Vec& x, bool inverse_transpose = false) const;

  // (d_n gamma_a)_a; identically zero exactly when d_n is the Reeb field.
  Vec reeb_defect(const Vec& x) const;

 private:
  int m_;
  std::vector<expr::Expr> gamma_;
  std::string label_ = "custom";
};

// Affine transition between adapted charts: x^a -> A x + b on the base block,
// x^n -> x^n + c. These are exactly the transitions that preserve the adapted
// frame structure with constant coefficients.
struct AdaptedTransition {
  Mat A;    // invertible, 2m x 2m
  Vec b;    // 2m
  double c = 0.0;

  Vec apply(const Vec& x) const;          // maps a full (2m+1)-point
  Mat inverse_A() const;
};

// Pushforward of the components of an admissible (p,q)-tensor (one factor of
// A per upper slot, one factor of A^{-1} per lower slot). Components are
// indexed flat, row-major over p upper then q lower slots, each of range 2m.
std::vector<double> pushforward_admissible(const std::vector<double>& components,
                                           int p, int q,
                                           const AdaptedTransition& tr);

}  // namespace wagner::chart
