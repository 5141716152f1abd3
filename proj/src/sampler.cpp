#include "isostab/sampler.hpp"

#include <cmath>

#include "isostab/rng.hpp"

namespace isostab {

Vector ball_point(std::uint64_t seed, std::uint64_t index, int dim,
                  double radius) {
  const rng::Stream dirs{rng::derive(seed, "ball-dir")};
  const rng::Stream radial{rng::derive(seed, "ball-r")};
  Vector g(dim);
  for (int j = 0; j < dim; ++j) {
    g(j) = dirs.gauss(index * static_cast<std::uint64_t>(dim) + j);
  }
  double gn = g.norm();
  if (gn < 1e-300) {
    g.setZero();
    g(0) = 1.0;
    gn = 1.0;
  }
  const double u = radial.u01(index);
  const double r = radius * std::pow(u, 1.0 / dim);
  return (r / gn) * g;
}

std::vector<Vector> grid_points(int dim, double radius,
                                const std::vector<Vector>& critical) {
  std::vector<Vector> pts;
  pts.reserve(2 * dim + 1 + critical.size());
  pts.push_back(Vector::Zero(dim));
  for (int i = 0; i < dim; ++i) {
    Vector e = Vector::Zero(dim);
    e(i) = radius;
    pts.push_back(e);
    pts.push_back(-e);
  }
  for (const Vector& c : critical) {
    if (c.size() == dim) pts.push_back(c);
  }
  return pts;
}

}  // namespace isostab
