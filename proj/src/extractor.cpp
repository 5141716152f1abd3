#include "isostab/extractor.hpp"

#include <cmath>
#include <string>

#include "isostab/json_writer.hpp"
#include "isostab/parallel.hpp"
#include "isostab/rng.hpp"

namespace isostab::extractor {

namespace {

// 2^n ||x|| beyond this loses the doubling estimate to overflow.
constexpr double kScaleGuard = 1e300;

}  // namespace

void validate(const ExtractionConfig& cfg) {
  if (!(cfg.tol >= 1e-10)) {
    throw InvalidSpecError("extraction: tol must be >= 1e-10");
  }
  if (cfg.n_max < 0 || cfg.n_max > 60) {
    throw InvalidSpecError("extraction: n_max must lie in [0, 60]");
  }
}

double apriori_rate(double eps, double r, int n) {
  const double p = std::ldexp(1.0, -n);
  return std::sqrt(6.0 * eps * r * p + eps * eps * p * p);
}

int stopping_index(double eps, double r, const ExtractionConfig& cfg,
                   bool* converged) {
  for (int n = 0; n <= cfg.n_max; ++n) {
    if (apriori_rate(eps, r, n) <= cfg.tol) {
      if (converged != nullptr) *converged = true;
      return n;
    }
  }
  if (converged != nullptr) *converged = false;
  return cfg.n_max;
}

Vector doubling_estimate(const gallery::MapFn& fn, const Vector& x, int n) {
  const double scale = std::ldexp(1.0, n);
  if (x.norm() * scale > kScaleGuard) {
    throw OverflowGuardError(
        "doubling_estimate: 2^" + std::to_string(n) + " * ||x|| exceeds " +
        format_double(kScaleGuard) + "; reduce n_max or rescale the input");
  }
  return fn.eval(scale * x) * std::ldexp(1.0, -n);
}

std::pair<Vector, int> extract_at_fn(const gallery::MapFn& fn,
                                     const Vector& x,
                                     const ExtractionConfig& cfg) {
  validate(cfg);
  if (x.size() != fn.dim_in) {
    throw DimensionError("extract_at: expected dimension " +
                         std::to_string(fn.dim_in));
  }
  require_finite(x, "extract_at");
  const double r = x.norm();
  if (r == 0.0) return {Vector::Zero(fn.dim_out), 0};
  const int n = stopping_index(fn.analytic_epsilon, r, cfg, nullptr);
  return {doubling_estimate(fn, x, n), n};
}

std::pair<Vector, int> extract_at(const gallery::MapSpec& spec,
                                  const Vector& x,
                                  const ExtractionConfig& cfg) {
  return extract_at_fn(gallery::to_fn(spec), x, cfg);
}

IsometryFrame IsometryFrame::from_isometry(const Matrix& u) {
  const double dev =
      max_abs(u.transpose() * u - Matrix::Identity(u.cols(), u.cols()));
  if (dev > kOrthTol) {
    throw InvalidSpecError(
        "IsometryFrame: columns are not orthonormal (deviation " +
        format_double(dev) + ")");
  }
  IsometryFrame f;
  f.U = u;
  f.P = u * u.transpose();
  f.T = u.transpose();
  return f;
}

FrameDeviations frame_deviations(const IsometryFrame& frame) {
  const Eigen::Index k = frame.P.rows();
  const Eigen::Index m = frame.U.cols();
  FrameDeviations d;
  d.p_idempotent = max_abs(frame.P * frame.P - frame.P);
  d.p_symmetric = max_abs(frame.P - frame.P.transpose());
  d.tu_identity = max_abs(frame.T * frame.U - Matrix::Identity(m, m));
  d.t_annihilates =
      max_abs(frame.T * (Matrix::Identity(k, k) - frame.P));
  d.t_op_norm = operator_norm(frame.T);
  return d;
}

std::pair<ExtractionResult, IsometryFrame> assemble_frame_fn(
    const gallery::MapFn& fn, const ExtractionConfig& cfg) {
  validate(cfg);
  const int m = fn.dim_in, k = fn.dim_out;
  if (k < m) {
    throw InvalidSpecError(
        "assemble_frame: dim_in > dim_out admits no isometry");
  }

  ExtractionResult res;
  res.raw_U.resize(k, m);
  res.per_column_n.assign(m, 0);
  bool all_converged = true;

  // Basis vectors all have norm one, so the stopping index is shared; keep
  // the per-column record anyway.
  bool conv = false;
  const int n = stopping_index(fn.analytic_epsilon, 1.0, cfg, &conv);
  all_converged = conv;
  std::vector<Vector> cols(m);
  par::for_chunks(m, 1, [&](std::int64_t, std::int64_t b, std::int64_t e) {
    for (std::int64_t i = b; i < e; ++i) {
      Vector basis = Vector::Zero(m);
      basis(i) = 1.0;
      cols[i] = doubling_estimate(fn, basis, n);
    }
  });
  for (int i = 0; i < m; ++i) {
    res.raw_U.col(i) = cols[i];
    res.per_column_n[i] = n;
  }
  res.converged = all_converged;
  res.ortho_deviation = max_abs(res.raw_U.transpose() * res.raw_U -
                                Matrix::Identity(m, m));

  // When the n_max cap binds, the columns are only good to the achieved
  // a-priori rate; consistency checks must not flag an honest slow run.
  const double eff_tol =
      std::max(cfg.tol, apriori_rate(fn.analytic_epsilon, 1.0, n));

  if (res.ortho_deviation > 100.0 * eff_tol) {
    throw InconsistencyError(
        "assemble_frame: doubling limit is not close to an isometry "
        "(ortho deviation " +
        format_double(res.ortho_deviation) + " > 100 * tol); the map is "
        "likely not a certified epsilon-isometry");
  }

  res.U = nearest_isometry(res.raw_U);
  IsometryFrame frame = IsometryFrame::from_isometry(res.U);

  // The limit map of an epsilon-isometry is linear, so the basis columns
  // determine it; this guards the finite-n approximation at random points.
  const rng::Stream pts{rng::derive(0xA11CEull, "lin-check")};
  constexpr int kChecks = 32;
  for (int c = 0; c < kChecks; ++c) {
    Vector x(m);
    for (int j = 0; j < m; ++j) {
      x(j) = pts.gauss(static_cast<std::uint64_t>(c) * m + j);
    }
    x *= 0.5 + 2.0 * pts.u01(0x10000000ull + c);
    const auto [est, n_used] = extract_at_fn(fn, x, cfg);
    const double lin_tol = 2.0 * eff_tol * (1.0 + x.norm());
    const double dev = (est - frame.U * x).norm();
    if (dev > lin_tol) {
      throw InconsistencyError(
          "assemble_frame: doubling limit deviates from linearity at a "
          "random point (deviation " +
          format_double(dev) + " > " + format_double(lin_tol) +
          " with n = " + std::to_string(n_used) + ")");
    }
  }

  return {std::move(res), std::move(frame)};
}

std::pair<ExtractionResult, IsometryFrame> assemble_frame(
    const gallery::MapSpec& spec, const ExtractionConfig& cfg) {
  return assemble_frame_fn(gallery::to_fn(spec), cfg);
}

}  // namespace isostab::extractor
