#pragma once

#include <cmath>
#include <cstdlib>
#include <functional>
#include <vector>

#include "wagner/types.hpp"

namespace wagner::numerics {

class SingularMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Gauss-Jordan inversion over any commutative field-like scalar (double, or a
// jet whose value is invertible). `magnitude` supplies |.| of a scalar for
// pivot selection.
template <class T, class Magnitude>
std::vector<std::vector<T>> invert(std::vector<std::vector<T>> a,
                                   Magnitude magnitude) {
  const std::size_t n = a.size();
  std::vector<std::vector<T>> inv(n);
  for (std::size_t i = 0; i < n; ++i) {
    inv[i].resize(n, a[0][0] * 0.0);
    inv[i][i] = a[0][0] * 0.0 + 1.0;
  }
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    double best = magnitude(a[col][col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double cand = magnitude(a[r][col]);
      if (cand > best) {
        best = cand;
        pivot = r;
      }
    }
    if (!(best > 0.0)) {
      throw SingularMatrixError("singular matrix (pivot " +
                                std::to_string(col) + ")");
    }
    std::swap(a[col], a[pivot]);
    std::swap(inv[col], inv[pivot]);
    const T d = a[col][col];
    for (std::size_t c = 0; c < n; ++c) {
      a[col][c] = a[col][c] / d;
      inv[col][c] = inv[col][c] / d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const T f = a[r][col];
      if (magnitude(f) == 0.0) continue;
      for (std::size_t c = 0; c < n; ++c) {
        a[r][c] = a[r][c] - f * a[col][c];
        inv[r][c] = inv[r][c] - f * inv[col][c];
      }
    }
  }
  return inv;
}

Mat invert(const Mat& a);

// Cholesky factorization attempt; returns false when the matrix is not
// (numerically) symmetric positive definite.
bool cholesky(const Mat& a);

// Smallest eigenvalue of a small symmetric matrix (cyclic Jacobi).
double smallest_eigenvalue_sym(Mat a);

// Runs fn(i) for i in [0, count). Honors the WAGNER_THREADS environment
// variable (default 1); results must be written to disjoint slots so the
// outcome is independent of the thread count.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace wagner::numerics
