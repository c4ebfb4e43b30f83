#include "wagner/sampling.hpp"

#include <cmath>

namespace wagner::sampling {

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double SplitMix64::next_unit() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double SplitMix64::uniform(double lo, double hi) {
  return lo + (hi - lo) * next_unit();
}

SampleBox unit_box(int m) {
  const int n = 2 * m + 1;
  SampleBox box;
  box.x_min.assign(n, -1.0);
  box.x_max.assign(n, 1.0);
  return box;
}

std::vector<FiberPoint> sample_fiber_points(const SampleBox& box, int m,
                                            std::size_t count,
                                            std::uint64_t seed) {
  const int n = 2 * m + 1;
  const int f = 2 * m;
  if (static_cast<int>(box.x_min.size()) != n ||
      static_cast<int>(box.x_max.size()) != n) {
    throw ConfigError("sample box bounds must have dimension 2m+1");
  }
  if (!(box.v_norm_min > 0.0) || box.v_norm_max < box.v_norm_min) {
    throw ConfigError("sample box velocity norm bounds must satisfy 0 < min <= max");
  }
  SplitMix64 rng(seed);
  std::vector<FiberPoint> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    FiberPoint p;
    p.x.resize(n);
    for (int d = 0; d < n; ++d) p.x[d] = rng.uniform(box.x_min[d], box.x_max[d]);
    p.v.resize(f);
    double norm = 0.0;
    do {
      norm = 0.0;
      for (int d = 0; d < f; ++d) {
        p.v[d] = rng.uniform(-1.0, 1.0);
        norm += p.v[d] * p.v[d];
      }
      norm = std::sqrt(norm);
    } while (norm < 1e-3);
    const double target = rng.uniform(box.v_norm_min, box.v_norm_max);
    for (int d = 0; d < f; ++d) p.v[d] *= target / norm;
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace wagner::sampling
