#pragma once

// Seeded, counter-based point sampling shared by certification and bound
// verification.  The deterministic grid always covers the origin and the
// axis extremes; families add their own critical points on top.

#include <cstdint>
#include <vector>

#include "isostab/space.hpp"

namespace isostab {

struct SamplerConfig {
  std::int64_t n = 1000;    // random sample (or pair) count
  double radius = 100.0;    // ball radius
  std::uint64_t seed = 0;
};

/// i-th point of the stream: uniform in the ball of the given radius.
Vector ball_point(std::uint64_t seed, std::uint64_t index, int dim,
                  double radius);

/// Deterministic grid: 0, +/- radius * e_i, then the critical points.
std::vector<Vector> grid_points(int dim, double radius,
                                const std::vector<Vector>& critical);

}  // namespace isostab
