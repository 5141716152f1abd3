#include "isostab/bounds.hpp"

#include <cmath>
#include <string>

#include "isostab/json_writer.hpp"
#include "isostab/parallel.hpp"
#include "isostab/rng.hpp"

namespace isostab::bounds {

double bound4_value(double eps, double r) {
  return std::sqrt(6.0 * eps * r + eps * eps);
}

namespace {

ResidualSample residual_from(const gallery::MapFn& fn,
                             const extractor::IsometryFrame& frame,
                             const Vector& x) {
  const Vector fx = fn.eval(x);
  const Vector ux = frame.U * x;
  const Vector pf = frame.P * fx;
  ResidualSample s;
  s.x = x;
  s.r = x.norm();
  s.h_norm = (pf - ux).norm();
  s.k_norm = (fx - pf).norm();
  s.t_resid = (frame.T * fx - x).norm();
  s.full_resid = (fx - ux).norm();
  s.bound2_margin = 2.0 * fn.epsilon - s.t_resid;
  s.bound3_margin = 2.0 * fn.epsilon - s.h_norm;
  s.bound4_margin = bound4_value(fn.epsilon, s.r) - s.k_norm;
  return s;
}

void check_frame_dims(const gallery::MapSpec& spec,
                      const extractor::IsometryFrame& frame) {
  if (frame.U.rows() != spec.dim_out || frame.U.cols() != spec.dim_in) {
    throw DimensionError("frame does not match the map's dimensions");
  }
}

}  // namespace

ResidualSample residual_at(const gallery::MapSpec& spec,
                           const extractor::IsometryFrame& frame,
                           const Vector& x) {
  check_frame_dims(spec, frame);
  return residual_from(gallery::to_fn(spec), frame, x);
}

BoundReport verify_bounds(const gallery::MapSpec& spec,
                          const extractor::IsometryFrame& frame,
                          const SamplerConfig& sampler) {
  check_frame_dims(spec, frame);
  const gallery::MapFn fn = gallery::to_fn(spec);

  const auto grid =
      grid_points(fn.dim_in, sampler.radius, fn.critical_points);
  const std::int64_t total =
      static_cast<std::int64_t>(grid.size()) + sampler.n;

  BoundReport rep;
  rep.samples.resize(total);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    rep.samples[i] = residual_from(fn, frame, grid[i]);
  }
  const std::uint64_t pt_seed = rng::derive(sampler.seed, "bounds-pts");
  const std::int64_t base = static_cast<std::int64_t>(grid.size());
  par::for_chunks(sampler.n, 1024,
                  [&](std::int64_t, std::int64_t b, std::int64_t e) {
                    for (std::int64_t i = b; i < e; ++i) {
                      const Vector x = ball_point(pt_seed, i, fn.dim_in,
                                                  sampler.radius);
                      rep.samples[base + i] = residual_from(fn, frame, x);
                    }
                  });

  rep.min_margin2 = rep.min_margin3 = rep.min_margin4 =
      std::numeric_limits<double>::infinity();
  for (const ResidualSample& s : rep.samples) {
    if (s.bound2_margin < rep.min_margin2) {
      rep.min_margin2 = s.bound2_margin;
      rep.worst_x2 = s.x;
    }
    if (s.bound3_margin < rep.min_margin3) {
      rep.min_margin3 = s.bound3_margin;
      rep.worst_x3 = s.x;
    }
    if (s.bound4_margin < rep.min_margin4) {
      rep.min_margin4 = s.bound4_margin;
      rep.worst_x4 = s.x;
    }
  }
  rep.all_pass = rep.min_margin2 >= -kMarginTol &&
                 rep.min_margin3 >= -kMarginTol &&
                 rep.min_margin4 >= -kMarginTol;
  return rep;
}

std::pair<bool, bool> ball_membership(const gallery::MapSpec& spec,
                                      const Vector& x, int k) {
  if (k < 1) throw PreconditionError("ball_membership: k must be >= 1");
  const double r = x.norm();
  if (r == 0.0) throw PreconditionError("ball_membership: x must be nonzero");
  const gallery::MapFn fn = gallery::to_fn(spec);
  const Vector fx = fn.eval(x);
  const Vector fkx = fn.eval(static_cast<double>(k) * x);
  const bool in_b1 = fx.norm() <= r + spec.epsilon;
  const bool in_b2 = (fx - fkx).norm() <= (k - 1) * r + spec.epsilon;
  return {in_b1, in_b2};
}

MidpointCheck midpoint_inequality(const gallery::MapSpec& spec,
                                  const Vector& x, int k, const Vector& y) {
  const double eps = spec.epsilon;
  const double r = x.norm();
  if (k < 1 || !(k * r - eps > 0.0)) {
    throw PreconditionError(
        "midpoint_inequality: require k*r - eps > 0 (got k = " +
        std::to_string(k) + ", r = " + format_double(r) + ", eps = " +
        format_double(eps) + ")");
  }
  const gallery::MapFn fn = gallery::to_fn(spec);
  if (y.size() != fn.dim_out) {
    throw DimensionError("midpoint_inequality: y must live in the codomain");
  }
  const Vector fkx = fn.eval(static_cast<double>(k) * x);
  if (!(y.norm() <= r + eps)) {
    throw PreconditionError(
        "midpoint_inequality: y lies outside B1 (||y|| = " +
        format_double(y.norm()) + " > r + eps = " + format_double(r + eps) +
        ")");
  }
  if (!((y - fkx).norm() <= (k - 1) * r + eps)) {
    throw PreconditionError(
        "midpoint_inequality: y lies outside B2 (||y - f(kx)|| = " +
        format_double((y - fkx).norm()) + " > (k-1) r + eps = " +
        format_double((k - 1) * r + eps) + ")");
  }
  MidpointCheck c;
  const double inv_k = 1.0 / k;
  c.lhs = (y - inv_k * fkx).squaredNorm();
  c.rhs = 6.0 * eps * r * (1.0 - inv_k) +
          eps * eps * (1.0 - inv_k + inv_k * inv_k);
  c.holds = c.lhs <= c.rhs + kMarginTol;
  return c;
}

double midpoint_defect(const gallery::MapSpec& spec, const Vector& x,
                       const Vector& y) {
  const gallery::MapFn fn = gallery::to_fn(spec);
  const Vector mid = fn.eval(0.5 * (x + y));
  return (mid - 0.5 * (fn.eval(x) + fn.eval(y))).norm();
}

}  // namespace isostab::bounds
