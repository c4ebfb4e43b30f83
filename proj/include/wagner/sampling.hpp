#pragma once

#include <cstdint>

#include "wagner/types.hpp"

namespace wagner::sampling {

// SplitMix64: a splittable counter-based 64-bit generator. Chosen so any
// implementation language can reproduce a manifest's sample set from its seed
// alone. Constants (Steele, Lea, Flood 2014):
//   increment   0x9E3779B97F4A7C15
//   mix stage 1 z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   mix stage 2 z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   output      z ^ (z >> 31)
// Doubles are produced as (word >> 11) * 2^-53, uniform on [0, 1).
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();
  double next_unit();                      // [0, 1)
  double uniform(double lo, double hi);    // [lo, hi)

 private:
  std::uint64_t state_;
};

struct SampleBox {
  Vec x_min, x_max;          // size 2m+1
  double v_norm_min = 0.5;   // Euclidean norm bounds for the sampled velocity
  double v_norm_max = 2.0;
};

// Default box [-1, 1]^{2m+1} with |v| in [0.5, 2].
SampleBox unit_box(int m);

// Deterministic sample stream: x uniform in the box, v a uniform direction
// scaled to a norm uniform in [v_norm_min, v_norm_max].
std::vector<FiberPoint> sample_fiber_points(const SampleBox& box, int m,
                                            std::size_t count,
                                            std::uint64_t seed);

}  // namespace wagner::sampling
