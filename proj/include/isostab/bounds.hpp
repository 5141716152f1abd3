#pragma once

// Quantitative stability checks for a certified epsilon-isometry f with
// extracted frame (U, P, T):
//
//   (2)  ||T f(x) - x||      <= 2 eps
//   (3)  ||P f(x) - U x||    <= 2 eps
//   (4)  ||(I - P) f(x)||    <= sqrt(6 eps ||x|| + eps^2)
//
// plus executable replays of the proof steps behind (4): membership of f(x)
// in the balls B1, B2 and the k-indexed midpoint-type inequality whose
// k -> infinity limit recovers the unconditional bound.

#include <utility>
#include <vector>

#include "isostab/extractor.hpp"
#include "isostab/gallery.hpp"
#include "isostab/sampler.hpp"
#include "isostab/space.hpp"

namespace isostab::bounds {

/// Margins are checked against this additive slack; the bounds themselves
/// are O(eps) >= 1e-4, so absolute tolerance is unambiguous.
inline constexpr double kMarginTol = 1e-9;

/// sqrt(6 eps r + eps^2), the right-hand side of bound (4).
double bound4_value(double eps, double r);

struct ResidualSample {
  Vector x;
  double r = 0.0;            // ||x||
  double h_norm = 0.0;       // ||P f(x) - U x||
  double k_norm = 0.0;       // ||(I - P) f(x)||
  double t_resid = 0.0;      // ||T f(x) - x||
  double full_resid = 0.0;   // ||f(x) - U x||
  double bound2_margin = 0.0;  // 2 eps - t_resid
  double bound3_margin = 0.0;  // 2 eps - h_norm
  double bound4_margin = 0.0;  // sqrt(6 eps r + eps^2) - k_norm
};

ResidualSample residual_at(const gallery::MapSpec& spec,
                           const extractor::IsometryFrame& frame,
                           const Vector& x);

struct BoundReport {
  std::vector<ResidualSample> samples;
  double min_margin2 = 0.0;
  double min_margin3 = 0.0;
  double min_margin4 = 0.0;
  bool all_pass = false;  // every margin >= -kMarginTol
  Vector worst_x2, worst_x3, worst_x4;
};

/// Evaluates residual_at over the deterministic grid, the family critical
/// points, and sampler.n random ball points.  Failures are report content,
/// never errors.
BoundReport verify_bounds(const gallery::MapSpec& spec,
                          const extractor::IsometryFrame& frame,
                          const SamplerConfig& sampler);

/// Proof-step check: f(x) lies in
///   B1 = { y : ||y|| <= r + eps }  and
///   B2 = { y : ||y - f(kx)|| <= (k-1) r + eps }.
std::pair<bool, bool> ball_membership(const gallery::MapSpec& spec,
                                      const Vector& x, int k);

struct MidpointCheck {
  double lhs = 0.0;  // ||y - f(kx)/k||^2
  double rhs = 0.0;  // 6 eps r (1 - 1/k) + eps^2 (1 - 1/k + 1/k^2)
  bool holds = false;
};

/// The k-indexed inequality for y in B1 intersect B2.  Throws
/// PreconditionError naming the failed condition when y is outside B1 or
/// B2, or when k r - eps <= 0.
MidpointCheck midpoint_inequality(const gallery::MapSpec& spec,
                                  const Vector& x, int k, const Vector& y);

/// ||f((x+y)/2) - (f(x)+f(y))/2||.  Zero for exact isometries; a pure
/// diagnostic for eps > 0 (no quantitative bound is checked).
double midpoint_defect(const gallery::MapSpec& spec, const Vector& x,
                       const Vector& y);

}  // namespace isostab::bounds
