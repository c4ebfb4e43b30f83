#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace wagner {

using Vec = std::vector<double>;
using Mat = std::vector<std::vector<double>>;
using Tens3 = std::vector<std::vector<std::vector<double>>>;

// A point of the fibered phase space: base coordinates x (dimension 2m+1)
// and a distribution-valued velocity v (dimension 2m).
struct FiberPoint {
  Vec x;
  Vec v;
};

inline Mat zero_mat(std::size_t rows, std::size_t cols) {
  return Mat(rows, Vec(cols, 0.0));
}

inline Tens3 zero_tens3(std::size_t a, std::size_t b, std::size_t c) {
  return Tens3(a, zero_mat(b, c));
}

std::string format_point(const FiberPoint& p);

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Contact structure degenerates: the fundamental 2-form drops rank.
class DegenerateStructureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Fiber metric not positive definite at a point.
class MetricDegeneracyError : public std::runtime_error {
 public:
  MetricDegeneracyError(const std::string& message, double min_eigenvalue)
      : std::runtime_error(message), min_eigenvalue(min_eigenvalue) {}
  double min_eigenvalue;
};

}  // namespace wagner
